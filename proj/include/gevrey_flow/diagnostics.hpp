#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gevrey_flow/dynamics.hpp"
#include "gevrey_flow/fft.hpp"
#include "gevrey_flow/initial_data.hpp"
#include "gevrey_flow/model.hpp"
#include "gevrey_flow/norms.hpp"
#include "gevrey_flow/parallel.hpp"

namespace gevrey_flow {

struct DecayFit {
  double rate = 0.0;  // slope of log(norm) against t
  double intercept = 0.0;
  double standard_error = 0.0;
  double ci_lower = 0.0;  // rate -+ 1.96 standard errors
  double ci_upper = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t samples = 0;
};

/// Least-squares fit of log(values) = intercept + rate t over t in [t_lo, t_hi].
inline DecayFit fit_decay(const NormSeries& series, double t_lo, double t_hi) {
  if (series.times.size() != series.values.size()) {
    throw std::invalid_argument("fit_decay: times and values differ in length");
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t < t_lo || t > t_hi) continue;
    if (!(series.values[i] > 0.0)) {
      throw std::domain_error("nonpositive norm in window at t = " + std::to_string(t));
    }
    x.push_back(t);
    y.push_back(std::log(series.values[i]));
  }
  if (x.size() < 10) {
    throw std::invalid_argument("fit_decay: need >= 10 samples in window, got " +
                                std::to_string(x.size()));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_decay: window has a single time");
  DecayFit fit;
  fit.rate = sxy / sxx;
  fit.intercept = my - fit.rate * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.rate * x[i];
    rss += r * r;
  }
  fit.standard_error = std::sqrt(rss / (n - 2.0) / sxx);
  fit.ci_lower = fit.rate - 1.96 * fit.standard_error;
  fit.ci_upper = fit.rate + 1.96 * fit.standard_error;
  fit.t_lo = x.front();
  fit.t_hi = x.back();
  fit.samples = x.size();
  return fit;
}

struct MonotonicityVerdict {
  bool monotone = true;
  std::optional<double> first_violation_time;
  double worst_relative_increase = 0.0;
};

/// Nonincreasing up to a relative tolerance.
inline MonotonicityVerdict monotonicity_check(const NormSeries& series, double rel_tol = 1e-10) {
  MonotonicityVerdict v;
  for (std::size_t i = 1; i < series.values.size(); ++i) {
    const double prev = series.values[i - 1];
    const double cur = series.values[i];
    if (cur <= prev * (1.0 + rel_tol)) continue;
    const double rel = prev > 0.0 ? (cur - prev) / prev : std::numeric_limits<double>::infinity();
    v.worst_relative_increase = std::max(v.worst_relative_increase, rel);
    if (v.monotone) {
      v.monotone = false;
      v.first_violation_time = series.times[i];
    }
  }
  return v;
}

/// zeta / (2 C |M|) minus the current norm; positive inside the persistence regime.
inline double smallness_margin(const SimState& state, const NormSchedule& spec,
                               const ModelConfig& cfg, double smallness_constant, double zeta) {
  if (!(zeta > 0.0)) throw std::domain_error("smallness_margin: zeta must be > 0");
  if (!(smallness_constant > 0.0)) {
    throw std::invalid_argument("smallness_margin: constant must be > 0");
  }
  const double mnorm = cfg.matrix.operator_norm();
  const double threshold = mnorm == 0.0 ? std::numeric_limits<double>::infinity()
                                        : zeta / (2.0 * smallness_constant * mnorm);
  return threshold - spec.evaluate(state, cfg);
}

struct TheoremFormVerdict {
  bool holds = true;
  double worst_ratio = 0.0;  // max over t of norm(t) / (e^{-zeta t/2} norm(0))
  std::optional<double> first_violation_time;
};

/// norm(t) <= e^{-zeta t / 2} norm(0) (1 + tol) at every sample.
inline TheoremFormVerdict theorem_form_check(const NormSeries& series, double zeta, double tol) {
  TheoremFormVerdict v;
  if (series.values.empty()) return v;
  const double n0 = series.values.front();
  const double t0 = series.times.front();
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    const double bound = std::exp(-0.5 * zeta * (series.times[i] - t0)) * n0;
    const double ratio = bound > 0.0 ? series.values[i] / bound : (series.values[i] > 0.0 ? INFINITY : 0.0);
    v.worst_ratio = std::max(v.worst_ratio, ratio);
    if (series.values[i] > bound * (1.0 + tol) && v.holds) {
      v.holds = false;
      v.first_violation_time = series.times[i];
    }
  }
  return v;
}

/// One inequality lhs <= constant * rhs checked over many samples.
struct InequalityCheck {
  std::string name;
  std::size_t checks = 0;
  std::size_t violations = 0;        // lhs > constant rhs (1 + slack)
  double max_violation = 0.0;        // max (lhs - constant rhs) / (constant rhs)
  double empirical_constant = 0.0;   // max lhs / rhs
  double stated_constant = 0.0;      // largest constant used on the right-hand side

  void add(double lhs, double rhs, double constant, double slack) {
    ++checks;
    stated_constant = std::max(stated_constant, constant);
    if (rhs > 0.0) empirical_constant = std::max(empirical_constant, lhs / rhs);
    const double bound = constant * rhs;
    if (lhs > bound * (1.0 + slack)) {
      ++violations;
      max_violation = std::max(max_violation, bound > 0.0 ? (lhs - bound) / bound : INFINITY);
    }
  }
  bool passed() const { return violations == 0; }
};

struct EmbeddingReport {
  std::vector<InequalityCheck> inequalities;
  std::size_t n_fields = 0;
  bool passed() const {
    return std::all_of(inequalities.begin(), inequalities.end(),
                       [](const auto& c) { return c.passed(); });
  }
};

namespace detail {

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// (sum over 0 < |k|_inf <= K of |k|^{-exponent})^{1/q}, or the max for q = inf.
inline double holder_constant(const Lattice& lat, double exponent, double q, bool q_infinite) {
  double acc = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const Mode k = lat.mode(i);
    if (k.is_zero()) continue;
    const double w = abs_pow(k, -exponent);
    acc = q_infinite ? std::max(acc, w) : acc + std::pow(w, q);
  }
  return q_infinite ? acc : std::pow(acc, 1.0 / q);
}

// || |grad|^s f ||_{L^p(T^d)} by the rectangle rule on an n^d grid (exact for
// p = 2 once n >= 2K + 1).
inline double physical_lp_norm(const SpectralField& f, double s, double p, int n) {
  const Lattice& lat = f.lattice();
  const PeriodicFft fft(lat.dim(), n);
  std::vector<cplx> grid(fft.size(), cplx{0.0, 0.0});
  const double norm = 1.0 / torus_volume(lat.dim());
  const auto wrap = [n](int v) { return static_cast<std::size_t>(((v % n) + n) % n); };
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Mode k = lat.mode(i);
    const std::size_t g = lat.dim() == 1 ? wrap(k.k1) : wrap(k.k1) * static_cast<std::size_t>(n) + wrap(k.k2);
    grid[g] += norm * abs_pow(k, s) * f[i];
  }
  fft.backward(grid);
  const double cell = two_pi / n;
  const double weight = lat.dim() == 1 ? cell : cell * cell;
  double acc = 0.0;
  for (const auto& v : grid) acc += std::pow(std::abs(v), p);
  return std::pow(weight * acc, 1.0 / p);
}

}  // namespace detail

/// Random-field checks of the Gevrey embeddings and the Fourier-Lebesgue
/// embeddings, with the epsilon of the latter fixed to 0.01. Violations are
/// counted beyond a relative slack of 1e-12.
inline EmbeddingReport embedding_suite(std::size_t n_fields, std::uint64_t seed,
                                       double slack = 1e-12) {
  EmbeddingReport rep;
  rep.n_fields = n_fields;
  InequalityCheck lower_radius{"gevrey_radius_shift"};
  InequalityCheck trade{"gevrey_smoothing_trade"};
  InequalityCheck holder{"fourier_lebesgue_summability"};
  InequalityCheck hausdorff_young{"fourier_lebesgue_vs_sobolev"};

  const std::vector<std::pair<double, double>> radii{{0.0, 0.0}, {0.0, 0.3}, {0.2, 0.2},
                                                     {0.1, 0.6}, {0.5, 1.5}};
  const std::vector<std::pair<double, double>> kappas{{0.0, 0.0}, {0.0, 0.4}, {0.5, 1.0},
                                                      {1.0, 2.7}, {-0.5, 0.5}};
  const std::vector<Summability> rs{Summability::finite(1.0), Summability::finite(2.0),
                                    Summability::finite(3.5), Summability::infinity()};
  const std::vector<double> ss{0.75, 1.0};
  constexpr double eps = 0.01;
  const std::vector<std::pair<double, Summability>> pr{
      {1.0, Summability::finite(2.0)}, {1.0, Summability::infinity()},
      {2.0, Summability::finite(4.0)}, {1.5, Summability::finite(3.0)}};
  const std::vector<double> hy_p{2.0, 3.0, 4.0};

  std::mt19937_64 rng(seed);
  for (std::size_t n = 0; n < n_fields; ++n) {
    const int d = 1 + static_cast<int>(n % 2);
    const int K = d == 1 ? 12 : 6;
    const Lattice lat(d, K);
    const double decay = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const SpectralField f = random_analytic_field(lat, rng(), decay);
    const double s = ss[n % ss.size()];

    for (const auto& r : rs) {
      for (const auto& [a, a2] : radii) {
        for (const auto& [k, k2] : kappas) {
          const double lhs1 = gevrey_norm(f, {a, k, r, s});
          lower_radius.add(lhs1, gevrey_norm(f, {a2, k2, r, s}), std::exp(a - a2), slack);
          if (a2 > a) {
            const int c = static_cast<int>(std::ceil(k2 - k));
            const double constant = detail::factorial(c) / std::pow(a2 - a, c);
            trade.add(gevrey_norm(f, {a, k2, r, s}), gevrey_norm(f, {a2, k, r, s}), constant, slack);
          }
        }
      }
    }
    for (const auto& [p, r] : pr) {
      const double inv_q = 1.0 / p - r.reciprocal();
      const double shift = d * inv_q + eps;
      const double constant =
          detail::holder_constant(lat, shift, r.is_infinite() ? p : 1.0 / inv_q, false);
      for (double sigma : {0.0, 0.5}) {
        holder.add(fourier_lebesgue_norm(f, sigma, Summability::finite(p)),
                   fourier_lebesgue_norm(f, sigma + shift, r), constant, slack);
      }
    }
    for (double p : hy_p) {
      const double p_conj = p / (p - 1.0);
      const int grid = p == 2.0 ? 2 * K + 1 : 16 * K;
      const double constant = std::pow(two_pi, d / p);
      for (double sigma : {0.0, 0.5}) {
        hausdorff_young.add(fourier_lebesgue_norm(f, sigma, Summability::finite(p)),
                            detail::physical_lp_norm(f, sigma, p_conj, grid), constant, slack);
      }
    }
  }
  rep.inequalities = {lower_radius, trade, holder, hausdorff_young};
  return rep;
}

/// max over sampled (f, g, k) of
/// |e^{phi|k|^s} F(B(f,g))(k)| / (|M| sum_{j != 0} |k| |j|^{1-gamma} |e^{phi|k-j|^s} f^(k-j)| |e^{phi|j|^s} g^(j)|)
/// with tau = nu W <= phi. The direct estimate gives C_g (2 pi)^{-d}.
struct BilinearBoundReport {
  std::size_t samples = 0;
  double max_ratio = 0.0;
  double derived_bound = 0.0;  // max over configs of C_g (2 pi)^{-d}
  std::size_t exceedances = 0;
  bool passed() const { return exceedances == 0; }
};

inline BilinearBoundReport bilinear_bound_suite(std::size_t n_samples, std::uint64_t seed) {
  BilinearBoundReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t per_pair = 10;
  for (std::size_t n = 0; rep.samples < n_samples; ++n) {
    const int d = 1 + static_cast<int>(n % 2);
    const int K = d == 1 ? 12 : 5;
    const Lattice lat(d, K);
    ModelConfig cfg;
    cfg.d = d;
    cfg.s = 0.6 + 0.4 * unit(rng);
    const double gamma = 0.5 + 2.0 * unit(rng);
    cfg.kernel = InteractionKernel::power_law(gamma, 0.5 + unit(rng));
    if (d == 1) {
      cfg.matrix = InteractionMatrix(1, {unit(rng) < 0.5 ? -1.0 : 1.0});
    } else {
      cfg.matrix = InteractionMatrix(2, {unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5,
                                         unit(rng) - 0.5});
    }
    const double phi = 0.5 * unit(rng);
    const double tau = phi - unit(rng);  // tau <= phi, either sign
    const SpectralField f = random_analytic_field(lat, rng(), 0.8);
    const SpectralField g = random_analytic_field(lat, rng(), 0.8);
    const SpectralField b = bilinear_B(f, g, tau, cfg);
    const double mnorm = cfg.matrix.operator_norm();
    const double bound = cfg.kernel.bound_constant() / torus_volume(d);
    rep.derived_bound = std::max(rep.derived_bound, bound);
    for (std::size_t m = 0; m < per_pair && rep.samples < n_samples; ++m) {
      std::size_t i;
      Mode k;
      do {
        i = static_cast<std::size_t>(unit(rng) * static_cast<double>(lat.size())) % lat.size();
        k = lat.mode(i);
      } while (k.is_zero());
      double denom = 0.0;
      for (std::size_t j = 0; j < lat.size(); ++j) {
        const Mode jm = lat.mode(j);
        if (jm.is_zero() || !lat.contains(k - jm)) continue;
        denom += k.norm() * abs_pow(jm, 1.0 - gamma) *
                 std::exp(phi * abs_pow(k - jm, cfg.s)) * std::abs(f.coeff(k - jm)) *
                 std::exp(phi * abs_pow(jm, cfg.s)) * std::abs(g[j]);
      }
      denom *= mnorm;
      const double num = std::exp(phi * abs_pow(k, cfg.s)) * std::abs(b[i]);
      ++rep.samples;
      if (denom == 0.0) continue;
      const double ratio = num / denom;
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      if (ratio > bound * (1.0 + 1e-12)) ++rep.exceedances;
    }
  }
  return rep;
}

/// Per-mode check of
/// d/dt |Y_k| <= -(nu^2|k|^{2s}/2 - beta|k|^s - mass Re(g^(k)) (Mk.k)) |Y_k| + |e^{phi|k|^s} F(B)(k)|,
/// Y_k = e^{phi^t |k|^s} rho^_k, by forward differences between consecutive
/// snapshots. The right side is taken as the larger of its values at the two
/// ends, plus a first-order allowance dt (|c_k| + 1) (|c_k| |Y| + |e^{phi} B|).
struct DissipationReport {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double worst_excess = 0.0;  // largest (lhs - rhs - allowance) / scale
  bool passed() const { return violations == 0; }
};

inline DissipationReport dissipation_check(const std::vector<SimState>& snapshots,
                                           const ModelConfig& cfg, bool fast = false) {
  DissipationReport rep;
  if (snapshots.size() < 2) return rep;
  const Lattice& lat = snapshots.front().rho.lattice();
  const BilinearOperator bilinear(lat, cfg);
  std::vector<double> c(lat.size()), abs_s(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const Mode k = lat.mode(i);
    abs_s[i] = abs_pow(k, cfg.s);
    c[i] = 0.5 * cfg.nu * cfg.nu * abs_pow(k, 2.0 * cfg.s) - cfg.beta * abs_s[i] -
           cfg.mass * cfg.kernel(k).real() * cfg.matrix.quadratic(k);
  }
  struct Eval {
    std::vector<double> y, b;
  };
  const auto eval = [&](const SimState& st) {
    Eval e{std::vector<double>(lat.size()), std::vector<double>(lat.size())};
    const SpectralField b = bilinear(st.rho, st.rho, st.nu_w, fast);
    for (std::size_t i = 0; i < lat.size(); ++i) {
      const double w = std::exp(st.phi * abs_s[i]);
      e.y[i] = w * std::abs(st.rho[i]);
      e.b[i] = w * std::abs(b[i]);
    }
    return e;
  };
  Eval prev = eval(snapshots.front());
  for (std::size_t n = 1; n < snapshots.size(); ++n) {
    const Eval cur = eval(snapshots[n]);
    const double dt = snapshots[n].t - snapshots[n - 1].t;
    for (std::size_t i = 0; i < lat.size(); ++i) {
      if (lat.mode(i).is_zero()) continue;
      const double lhs = (cur.y[i] - prev.y[i]) / dt;
      const double rhs = std::max(-c[i] * prev.y[i] + prev.b[i], -c[i] * cur.y[i] + cur.b[i]);
      const double scale = std::abs(c[i]) * std::max(prev.y[i], cur.y[i]) +
                           std::max(prev.b[i], cur.b[i]);
      const double allowance = dt * (std::abs(c[i]) + 1.0) * scale + 1e-12 * scale + 1e-300;
      ++rep.checks;
      if (lhs > rhs + allowance) {
        ++rep.violations;
        rep.worst_excess = std::max(rep.worst_excess, (lhs - rhs - allowance) / (scale + 1e-300));
      }
    }
    prev = cur;
  }
  return rep;
}

struct RescaleReport {
  double max_discrepancy = 0.0;           // max_k |rho_m(t) - rho(t/m)/m|
  double relative_discrepancy = 0.0;      // divided by max_k |rho(t/m)/m|
  std::size_t compared_times = 0;
  bool aborted = false;
  std::string diagnostic;
};

/// Runs (cfg, path) over [0, T/m] with step dt and the rescaled problem
/// (cfg_m, W_m) over [0, T] with step m dt, then compares
/// mu_m^t against mu^{t/m} / m at every shared snapshot.
inline RescaleReport rescale_equivalence_check(const ModelConfig& cfg, double m,
                                               const BrownianPath& path, const SpectralField& rho0,
                                               double T, const IntegratorConfig& icfg) {
  const MassRescaling tr = rescale_mass(cfg, m);
  const BrownianPath path_m = rescale_path(path, m);
  IntegratorConfig icfg_m = icfg;
  icfg_m.dt = icfg.dt * m;
  const SpectralField rho0_m = m == 1.0 ? rho0 : (1.0 / m) * rho0;

  const auto original = simulate(rho0, path, tr.original_time(T), icfg, cfg);
  const auto rescaled = simulate(rho0_m, path_m, T, icfg_m, tr.config);
  RescaleReport rep;
  if (original.aborted || rescaled.aborted) {
    rep.aborted = true;
    rep.diagnostic = original.aborted ? original.diagnostic : rescaled.diagnostic;
  }
  const std::size_t n = std::min(original.snapshots.size(), rescaled.snapshots.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    SpectralField expected = original.snapshots[i].rho;
    if (m != 1.0) expected *= 1.0 / m;
    rep.max_discrepancy = std::max(rep.max_discrepancy, max_abs_diff(rescaled.snapshots[i].rho, expected));
    scale = std::max(scale, expected.max_abs());
  }
  rep.compared_times = n;
  rep.relative_discrepancy = scale > 0.0 ? rep.max_discrepancy / scale : rep.max_discrepancy;
  return rep;
}

/// Fast-vs-direct comparison of B on random Hermitian fields:
/// max_k |fast - dealias(direct(dealias f, dealias g))| / max_k |direct|.
struct OracleReport {
  std::size_t trials = 0;
  double max_relative_diff = 0.0;
};

inline OracleReport bilinear_oracle_suite(const ModelConfig& cfg, const Lattice& lat,
                                          std::size_t n_fields, const std::vector<double>& taus,
                                          std::uint64_t seed) {
  OracleReport rep;
  const BilinearOperator op(lat, cfg);
  std::mt19937_64 rng(seed);
  for (std::size_t n = 0; n < n_fields; ++n) {
    const SpectralField f = dealias(random_analytic_field(lat, rng(), 0.2));
    const SpectralField g = dealias(random_analytic_field(lat, rng(), 0.2));
    for (double tau : taus) {
      const SpectralField ref = dealias(op.direct(f, g, tau));
      const SpectralField fast = op.fast(f, g, tau);
      const double scale = ref.max_abs();
      const double diff = max_abs_diff(ref, fast);
      rep.max_relative_diff = std::max(rep.max_relative_diff, scale > 0.0 ? diff / scale : diff);
      ++rep.trials;
    }
  }
  return rep;
}

/// exp_heun against the fixed-point oracle on a batch of paths. Per step size:
/// RMS and max over paths of the terminal max-mode difference. The order is
/// the least-squares slope of log RMS against log dt.
struct RichardsonRow {
  double dt = 0.0;
  double rms_diff = 0.0;
  double max_diff = 0.0;
};

struct RichardsonReport {
  std::vector<RichardsonRow> rows;  // ascending dt
  double order = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_paths = 0;
  std::vector<double> picard_final_distance;  // last successive distance per path
  bool contracting = true;
};

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

inline RichardsonReport richardson_study(const SpectralField& rho0, const std::vector<BrownianPath>& paths,
                                         double T, const ModelConfig& cfg, const PicardOptions& po,
                                         std::vector<double> dts, IntegratorConfig icfg = {},
                                         unsigned threads = worker_count()) {
  if (paths.empty()) throw std::invalid_argument("richardson_study: no paths");
  std::sort(dts.begin(), dts.end());
  RichardsonReport rep;
  rep.n_paths = paths.size();
  std::vector<std::vector<double>> diffs(paths.size(), std::vector<double>(dts.size()));
  std::vector<double> last(paths.size());
  std::vector<char> contracting(paths.size());
  icfg.scheme = Scheme::exp_heun;
  icfg.snapshot_stride = std::numeric_limits<std::size_t>::max();
  parallel_for(
      paths.size(),
      [&](std::size_t p) {
        const PicardResult pr = picard_solve(rho0, paths[p], T, cfg, po);
        last[p] = pr.distances.back();
        contracting[p] = pr.contracting ? 1 : 0;
        for (std::size_t i = 0; i < dts.size(); ++i) {
          IntegratorConfig ic = icfg;
          ic.dt = dts[i];
          const SimulationResult res = simulate(rho0, paths[p], T, ic, cfg);
          if (res.aborted) throw std::runtime_error("richardson_study: run aborted: " + res.diagnostic);
          diffs[p][i] = max_abs_diff(res.snapshots.back().rho, pr.final_state);
        }
      },
      threads);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    RichardsonRow row{dts[i], 0.0, 0.0};
    for (std::size_t p = 0; p < paths.size(); ++p) {
      row.rms_diff += diffs[p][i] * diffs[p][i];
      row.max_diff = std::max(row.max_diff, diffs[p][i]);
    }
    row.rms_diff = std::sqrt(row.rms_diff / static_cast<double>(paths.size()));
    rep.rows.push_back(row);
    if (row.rms_diff > 0.0) {
      lx.push_back(std::log(row.dt));
      ly.push_back(std::log(row.rms_diff));
    }
  }
  if (lx.size() >= 2) rep.order = least_squares_slope(lx, ly);
  rep.picard_final_distance = last;
  rep.contracting = std::all_of(contracting.begin(), contracting.end(), [](char c) { return c != 0; });
  return rep;
}

}  // namespace gevrey_flow
