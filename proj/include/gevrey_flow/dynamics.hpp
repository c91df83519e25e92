#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gevrey_flow/convolution.hpp"
#include "gevrey_flow/errors.hpp"
#include "gevrey_flow/fft.hpp"
#include "gevrey_flow/model.hpp"
#include "gevrey_flow/norms.hpp"
#include "gevrey_flow/spectral_field.hpp"
#include "gevrey_flow/stochastic.hpp"

namespace gevrey_flow {

enum class Scheme { exp_euler, exp_heun };

inline const char* scheme_name(Scheme s) { return s == Scheme::exp_euler ? "exp_euler" : "exp_heun"; }

struct IntegratorConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::exp_heun;
  /// true: transform-based B with 2/3 dealiasing; false: direct double loop.
  bool dealias = false;
  double overflow_cap = default_overflow_cap;
  bool enforce_zero_mode = true;
  /// Test hook: drop B entirely.
  bool suppress_nonlinearity = false;
  /// Abort once the ell^1 norm of rho exceeds this multiple of its initial value.
  double blowup_factor = 1e8;
  std::size_t snapshot_stride = 1;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("IntegratorConfig: dt must be > 0");
    if (!(overflow_cap > 0.0)) throw std::invalid_argument("IntegratorConfig: overflow_cap must be > 0");
    if (!(blowup_factor > 1.0)) throw std::invalid_argument("IntegratorConfig: blowup_factor must be > 1");
    if (snapshot_stride == 0) throw std::invalid_argument("IntegratorConfig: snapshot_stride must be >= 1");
  }
};

/// rho^t together with the path data it was computed under.
struct SimState {
  double t = 0.0;
  SpectralField rho;
  double w = 0.0;     // W^t
  double nu_w = 0.0;  // nu W^t, the multiplier exponent
  double phi = 0.0;   // alpha + beta t
};

namespace detail {

inline std::vector<double> abs_pow_table(const Lattice& lat, double s) {
  std::vector<double> out(lat.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = abs_pow(lat.mode(i), s);
  return out;
}

inline void check_tau(const Lattice& lat, double tau, double s, double cap, const char* what) {
  const double exponent = std::abs(tau) * std::pow(lat.max_wavenumber(), s);
  if (exponent > cap) {
    throw overflow_risk(std::string(what) + ": |tau| K^s = " + std::to_string(exponent) +
                        " exceeds cap " + std::to_string(cap));
  }
}

}  // namespace detail

/// Gamma with exponent tau: coeff(k) -> e^{-tau |k|^s} coeff(k).
inline SpectralField gamma_apply(const SpectralField& f, double tau, double s,
                                 double cap = default_overflow_cap) {
  detail::check_tau(f.lattice(), tau, s, cap, "gamma_apply");
  if (tau == 0.0) return f;
  return apply_multiplier(f, [&](Mode k) { return std::exp(-tau * abs_pow(k, s)); });
}

/// e^{-dt m(k)} coeff(k) with m the linear symbol.
inline SpectralField linear_propagate(const SpectralField& f, double dt, const ModelConfig& cfg,
                                      double cap = default_overflow_cap) {
  if (!(dt >= 0.0)) throw std::invalid_argument("linear_propagate: dt must be >= 0");
  if (dt == 0.0) return f;
  return apply_multiplier(f, [&](Mode k) {
    const cplx m = linear_symbol(k, cfg);
    if (-dt * m.real() > cap) throw overflow_risk("linear_propagate: growth factor exceeds cap");
    return std::exp(-dt * m);
  });
}

/// The bilinear operator B(f, g) = div Gamma(Gamma^{-1} f (M grad g * Gamma^{-1} g))
/// with Gamma = e^{-tau |grad|^s}, on a fixed lattice. Tables of |k|^s and g^(k)
/// are built once.
class BilinearOperator {
 public:
  BilinearOperator(const Lattice& lat, const ModelConfig& cfg)
      : lat_(lat),
        cfg_(cfg),
        abs_s_(detail::abs_pow_table(lat, cfg.s)),
        fft_(lat.dim(), static_cast<int>(lat.side())) {
    kernel_.resize(lat.size());
    for (std::size_t i = 0; i < kernel_.size(); ++i) kernel_[i] = cfg.kernel(lat.mode(i));
    max_abs_s_ = std::pow(lat.max_wavenumber(), cfg.s);
  }

  const Lattice& lattice() const { return lat_; }

  SpectralField operator()(const SpectralField& f, const SpectralField& g, double tau, bool fast,
                           double cap = default_overflow_cap) const {
    return fast ? this->fast(f, g, tau, cap) : direct(f, g, tau, cap);
  }

  /// Direct sum with one fused exponential e^{tau(|k-j|^s + |j|^s - |k|^s)} per term.
  SpectralField direct(const SpectralField& f, const SpectralField& g, double tau,
                       double cap = default_overflow_cap) const {
    check(f, g);
    // The fused exponent lies in [0, 2 max|k|^s]; only tau > 0 can overflow.
    if (tau > 0.0 && tau * 2.0 * max_abs_s_ > cap) {
      throw overflow_risk("bilinear_B: tau max(|k-j|^s + |j|^s - |k|^s) = " +
                          std::to_string(tau * 2.0 * max_abs_s_) + " exceeds cap " +
                          std::to_string(cap));
    }
    struct Term {
      Mode j;
      std::size_t idx;
      double mj1, mj2;
      cplx weight;
    };
    std::vector<Term> terms;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const cplx w = kernel_[j] * g[j];
      if (w == cplx{0.0, 0.0}) continue;
      const Mode jm = lat_.mode(j);
      const auto mj = cfg_.matrix.apply(jm);
      terms.push_back({jm, j, mj[0], mj[1], w});
    }
    SpectralField out(lat_, f.is_real() && g.is_real() ? Reality::real : Reality::complex);
    const double norm = -1.0 / torus_volume(lat_.dim());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Mode k = lat_.mode(i);
      if (k.is_zero()) continue;
      cplx acc{0.0, 0.0};
      for (const auto& term : terms) {
        const Mode kj = k - term.j;
        if (!lat_.contains(kj)) continue;
        const std::size_t ikj = lat_.index(kj);
        const cplx fv = f[ikj];
        if (fv == cplx{0.0, 0.0}) continue;
        const double kmj = k.k1 * term.mj1 + k.k2 * term.mj2;
        if (kmj == 0.0) continue;
        const double factor =
            tau == 0.0 ? 1.0 : std::exp(tau * (abs_s_[ikj] + abs_s_[term.idx] - abs_s_[i]));
        acc += (kmj * factor) * (term.weight * fv);
      }
      out[i] = norm * acc;
    }
    return out;
  }

  /// Transform path: Gamma^{-1} on both factors, pointwise product on the
  /// (2K+1)^d grid after 2/3 dealiasing, then Gamma and the divergence.
  SpectralField fast(const SpectralField& f, const SpectralField& g, double tau,
                     double cap = default_overflow_cap) const {
    check(f, g);
    detail::check_tau(lat_, tau, cfg_.s, cap, "bilinear_B (transform path)");
    const int keep = lat_.dealias_cutoff();
    SpectralField lifted_f(lat_, Reality::complex);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (lat_.mode(i).max_norm() <= keep) lifted_f[i] = std::exp(tau * abs_s_[i]) * f[i];
    }
    const auto u = detail::to_grid(lifted_f, fft_);
    const int d = lat_.dim();
    std::vector<std::vector<cplx>> products;
    for (int c = 0; c < d; ++c) {
      SpectralField v(lat_, Reality::complex);
      for (std::size_t j = 0; j < g.size(); ++j) {
        const Mode jm = lat_.mode(j);
        if (jm.max_norm() > keep || jm.is_zero()) continue;
        const auto mj = cfg_.matrix.apply(jm);
        v[j] = cplx{0.0, mj[static_cast<std::size_t>(c)]} * kernel_[j] *
               std::exp(tau * abs_s_[j]) * g[j];
      }
      auto grid = detail::to_grid(v, fft_);
      for (std::size_t n = 0; n < grid.size(); ++n) grid[n] *= u[n];
      products.push_back(std::move(grid));
    }
    std::vector<SpectralField> p;
    for (auto& grid : products) p.push_back(detail::from_grid(std::move(grid), lat_, fft_, Reality::complex));
    SpectralField out(lat_, Reality::complex);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Mode k = lat_.mode(i);
      if (k.max_norm() > keep || k.is_zero()) continue;
      cplx div = cplx{0.0, static_cast<double>(k.k1)} * p[0][i];
      if (d == 2) div += cplx{0.0, static_cast<double>(k.k2)} * p[1][i];
      out[i] = std::exp(-tau * abs_s_[i]) * div;
    }
    if (f.is_real() && g.is_real()) out.symmetrize();
    return out;
  }

 private:
  void check(const SpectralField& f, const SpectralField& g) const {
    if (!(f.lattice() == lat_)) throw lattice_mismatch("bilinear_B: first argument");
    if (!(g.lattice() == lat_)) throw lattice_mismatch("bilinear_B: second argument");
  }

  Lattice lat_;
  ModelConfig cfg_;
  std::vector<double> abs_s_;
  std::vector<cplx> kernel_;
  double max_abs_s_ = 0.0;
  PeriodicFft fft_;
};

/// B(f, g) at multiplier exponent tau = nu W^t. `fast` selects the transform path.
inline SpectralField bilinear_B(const SpectralField& f, const SpectralField& g, double tau,
                                const ModelConfig& cfg, bool fast = false,
                                double cap = default_overflow_cap) {
  f.require_same_lattice(g, "bilinear_B");
  return BilinearOperator(f.lattice(), cfg)(f, g, tau, fast, cap);
}

/// Exponential integrator for d rho/dt + (nu^2 A/2 + mass L) rho + B^t(rho, rho) = 0.
class Integrator {
 public:
  Integrator(const Lattice& lat, const ModelConfig& cfg, const IntegratorConfig& icfg)
      : lat_(lat), cfg_(cfg), icfg_(icfg), bilinear_(lat, cfg) {
    cfg.validate();
    icfg.validate();
    propagator_.resize(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
      const cplx m = linear_symbol(lat.mode(i), cfg);
      if (-icfg.dt * m.real() > icfg.overflow_cap) {
        throw overflow_risk("linear propagator growth over one step exceeds cap");
      }
      propagator_[i] = std::exp(-icfg.dt * m);
    }
  }

  const IntegratorConfig& config() const { return icfg_; }
  const ModelConfig& model() const { return cfg_; }
  const Lattice& lattice() const { return lat_; }

  SimState initial_state(const SpectralField& rho0, const BrownianPath& path) const {
    return state_at(0.0, rho0, path);
  }

  SimState state_at(double t, SpectralField rho, const BrownianPath& path) const {
    SimState s{t, std::move(rho), path.at(t), 0.0, 0.0};
    s.nu_w = cfg_.nu * s.w;
    s.phi = cfg_.alpha + cfg_.beta * t;
    return s;
  }

  /// B^t(rho, rho) at exponent tau (zero under the suppression hook).
  SpectralField nonlinear(const SpectralField& rho, double tau) const {
    if (icfg_.suppress_nonlinearity) return SpectralField(lat_, rho.reality());
    return bilinear_(rho, rho, tau, icfg_.dealias, icfg_.overflow_cap);
  }

  SpectralField propagate(const SpectralField& f) const {
    SpectralField out = f;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= propagator_[i];
    return out;
  }

  /// One step from s.t to s.t + dt. The zero-mode residual before enforcement
  /// is written to *zero_residual when given.
  SimState step(const SimState& s, const BrownianPath& path, double* zero_residual = nullptr) const {
    const double dt = icfg_.dt;
    const double t1 = (std::round(s.t / dt) + 1.0) * dt;
    const double tau0 = cfg_.nu * path.at(s.t);
    const double w1 = path.at(t1);
    const double tau1 = cfg_.nu * w1;

    const SpectralField b0 = nonlinear(s.rho, tau0);
    SpectralField next(lat_);
    if (icfg_.scheme == Scheme::exp_euler) {
      next = propagate(s.rho - dt * b0);
    } else {
      const SpectralField predictor = propagate(s.rho - dt * b0);
      const SpectralField b1 = nonlinear(predictor, tau1);
      next = propagate(s.rho - (0.5 * dt) * b0) - (0.5 * dt) * b1;
    }
    const std::size_t zero = lat_.index({0, 0});
    if (zero_residual) *zero_residual = std::abs(next[zero]);
    if (icfg_.enforce_zero_mode) next[zero] = cplx{0.0, 0.0};
    SimState out{t1, std::move(next), w1, tau1, cfg_.alpha + cfg_.beta * t1};
    return out;
  }

 private:
  Lattice lat_;
  ModelConfig cfg_;
  IntegratorConfig icfg_;
  BilinearOperator bilinear_;
  std::vector<cplx> propagator_;
};

/// A single step; builds the integrator tables on every call.
inline SimState etd_step(const SimState& state, const BrownianPath& path,
                         const IntegratorConfig& icfg, const ModelConfig& cfg) {
  return Integrator(state.rho.lattice(), cfg, icfg).step(state, path);
}

/// Gevrey norm schedule tracked during a simulation: radius phi^t, phi^t + epsilon
/// or a constant, with regularity kappa and summability r.
struct NormSchedule {
  enum class Radius { phi, phi_plus_epsilon, constant };
  Radius rule = Radius::phi_plus_epsilon;
  double a = 0.0;  // used by Radius::constant
  double kappa = 0.0;
  Summability r = Summability::finite(1.0);

  double radius(double phi, double epsilon) const {
    switch (rule) {
      case Radius::phi: return phi;
      case Radius::phi_plus_epsilon: return phi + epsilon;
      case Radius::constant: return a;
    }
    return a;
  }

  std::string rule_name() const {
    switch (rule) {
      case Radius::phi: return "phi";
      case Radius::phi_plus_epsilon: return "phi+eps";
      case Radius::constant: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", a);
        return buf;
      }
    }
    return "";
  }

  /// Column name, e.g. G[phi+eps;k=0.9;r=1].
  std::string name() const {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", kappa);
    return "G[" + rule_name() + ";k=" + buf + ";r=" + r.to_string() + "]";
  }

  double evaluate(const SimState& st, const ModelConfig& cfg) const {
    return gevrey_norm(st.rho, {radius(st.phi, cfg.epsilon), kappa, r, cfg.s});
  }
};

struct NormSeries {
  std::string name;
  std::vector<double> times;
  std::vector<double> values;
};

struct SimulationResult {
  std::vector<SimState> snapshots;
  std::vector<NormSeries> norms;  // one per schedule, sampled at the snapshots
  bool aborted = false;
  std::string diagnostic;
  std::optional<double> omega_violation_time;  // first t with phi^t < nu W^t
  double max_zero_mode_residual = 0.0;
  std::size_t steps = 0;
  double blowup_ratio = 1.0;  // largest ell^1(rho^t) / ell^1(rho^0) seen
};

/// Integrates from rho0 over [0, T]. Snapshots are kept every snapshot_stride
/// steps plus the final one. Blowup, overflow and non-finite values stop the
/// run with aborted = true and a diagnostic rather than an exception.
inline SimulationResult simulate(const SpectralField& rho0, const BrownianPath& path, double T,
                                 const IntegratorConfig& icfg, const ModelConfig& cfg,
                                 const std::vector<NormSchedule>& schedules = {}) {
  if (!(T >= 0.0)) throw std::invalid_argument("simulate: T must be >= 0");
  if (rho0.coeff({0, 0}) != cplx{0.0, 0.0}) {
    throw invalid_field("simulate: rho0 must have zero mean (rho^(0) = 0)");
  }
  const Integrator integrator(rho0.lattice(), cfg, icfg);
  const auto n_steps = static_cast<std::size_t>(std::llround(T / icfg.dt));
  if (std::abs(static_cast<double>(n_steps) * icfg.dt - T) > 1e-9 * std::max(1.0, T)) {
    throw std::invalid_argument("simulate: T must be a multiple of dt");
  }
  if (path.horizon() < static_cast<double>(n_steps) * icfg.dt * (1.0 - 1e-12)) {
    throw std::invalid_argument("simulate: path does not cover [0, T]");
  }

  SimulationResult res;
  for (const auto& sch : schedules) res.norms.push_back({sch.name(), {}, {}});
  const auto l1 = [](const SpectralField& f) {
    return fourier_lebesgue_norm(f, 0.0, Summability::finite(1.0));
  };
  const auto record = [&](const SimState& st) {
    for (std::size_t i = 0; i < schedules.size(); ++i) {
      res.norms[i].times.push_back(st.t);
      res.norms[i].values.push_back(schedules[i].evaluate(st, cfg));
    }
    res.snapshots.push_back(st);
  };
  const auto check_omega = [&](const SimState& st) {
    if (!res.omega_violation_time && st.phi - st.nu_w < 0.0) res.omega_violation_time = st.t;
  };

  SimState state = integrator.initial_state(rho0, path);
  const double initial_l1 = l1(rho0);
  check_omega(state);
  try {
    record(state);
  } catch (const std::exception& e) {
    res.aborted = true;
    res.diagnostic = std::string("norm evaluation failed at t = 0: ") + e.what();
    return res;
  }
  for (std::size_t n = 1; n <= n_steps; ++n) {
    double residual = 0.0;
    try {
      state = integrator.step(state, path, &residual);
    } catch (const overflow_risk& e) {
      res.aborted = true;
      res.diagnostic = "step " + std::to_string(n) + ": " + e.what();
      break;
    }
    res.steps = n;
    res.max_zero_mode_residual = std::max(res.max_zero_mode_residual, residual);
    check_omega(state);
    if (!state.rho.all_finite()) {
      res.aborted = true;
      res.diagnostic = "non-finite coefficients at t = " + std::to_string(state.t);
      break;
    }
    const double norm = l1(state.rho);
    if (initial_l1 > 0.0) {
      res.blowup_ratio = std::max(res.blowup_ratio, norm / initial_l1);
      if (norm > icfg.blowup_factor * initial_l1) {
        res.aborted = true;
        res.diagnostic = "blowup: ell^1 norm grew by factor " + std::to_string(norm / initial_l1) +
                         " > " + std::to_string(icfg.blowup_factor) +
                         " at t = " + std::to_string(state.t);
        record(state);
        break;
      }
    }
    if (n % icfg.snapshot_stride == 0 || n == n_steps) {
      try {
        record(state);
      } catch (const std::exception& e) {
        res.aborted = true;
        res.diagnostic = "norm evaluation failed at t = " + std::to_string(state.t) + ": " + e.what();
        break;
      }
    }
  }
  return res;
}

struct PicardOptions {
  int n_iter = 8;
  double quad_dt = 1e-5;
  bool fast = false;
  bool suppress_nonlinearity = false;
  double overflow_cap = default_overflow_cap;
};

struct PicardResult {
  SpectralField final_state;
  std::vector<double> distances;  // sup_t ell^1 distance between successive iterates
  std::vector<double> ratios;
  bool contracting = true;
  std::string warning;
};

/// Fixed-point iteration of rho = e^{-t(nu^2 A/2 + L)} rho0 - int_0^t e^{-(t-s)(...)} B^s ds,
/// started from the linear flow. The Duhamel integral uses the composite
/// trapezoid rule on the grid of spacing quad_dt, accumulated recursively.
inline PicardResult picard_solve(const SpectralField& rho0, const BrownianPath& path, double T,
                                 const ModelConfig& cfg, const PicardOptions& opt = {}) {
  if (opt.n_iter < 1) throw std::invalid_argument("picard_solve: n_iter must be >= 1");
  const double h = opt.quad_dt;
  const auto n = static_cast<std::size_t>(std::llround(T / h));
  if (n == 0 || std::abs(static_cast<double>(n) * h - T) > 1e-9 * std::max(1.0, T)) {
    throw std::invalid_argument("picard_solve: T must be a positive multiple of quad_dt");
  }
  IntegratorConfig icfg;
  icfg.dt = h;
  icfg.dealias = opt.fast;
  icfg.suppress_nonlinearity = opt.suppress_nonlinearity;
  icfg.overflow_cap = opt.overflow_cap;
  const Integrator step(rho0.lattice(), cfg, icfg);

  std::vector<double> tau(n + 1);
  for (std::size_t i = 0; i <= n; ++i) tau[i] = cfg.nu * path.at(static_cast<double>(i) * h);

  std::vector<SpectralField> linear;
  linear.reserve(n + 1);
  linear.push_back(rho0);
  for (std::size_t i = 1; i <= n; ++i) linear.push_back(step.propagate(linear.back()));

  std::vector<SpectralField> iterate = linear;
  PicardResult res{iterate.back(), {}, {}, true, {}};
  const auto l1 = [](const SpectralField& f) {
    return fourier_lebesgue_norm(f, 0.0, Summability::finite(1.0));
  };
  for (int it = 0; it < opt.n_iter; ++it) {
    std::vector<SpectralField> next;
    next.reserve(n + 1);
    next.push_back(rho0);
    SpectralField integral(rho0.lattice(), rho0.reality());
    SpectralField b_prev = step.nonlinear(iterate[0], tau[0]);
    double dist = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const SpectralField b_cur = step.nonlinear(iterate[i], tau[i]);
      integral = step.propagate(integral + (0.5 * h) * b_prev) + (0.5 * h) * b_cur;
      next.push_back(linear[i] - integral);
      dist = std::max(dist, l1(next.back() - iterate[i]));
      b_prev = b_cur;
    }
    res.distances.push_back(dist);
    iterate = std::move(next);
  }
  for (std::size_t i = 1; i < res.distances.size(); ++i) {
    const double prev = res.distances[i - 1];
    if (prev <= 1e-14) break;
    const double ratio = res.distances[i] / prev;
    res.ratios.push_back(ratio);
    if (ratio >= 1.0) res.contracting = false;
  }
  if (!res.contracting) res.warning = "non-contraction: successive distances did not decrease";
  res.final_state = iterate.back();
  return res;
}

/// mu = mass + rho, and theta = Gamma^{-1} mu when the overflow guard allows it.
struct MuTheta {
  SpectralField mu;
  std::optional<SpectralField> theta;
  std::string refusal;
};

inline MuTheta recover_mu_theta(const SimState& state, const ModelConfig& cfg,
                                double cap = default_overflow_cap) {
  SpectralField mu = state.rho;
  mu.set({0, 0}, mu.coeff({0, 0}) + cfg.mass * torus_volume(mu.lattice().dim()));
  MuTheta out{mu, std::nullopt, {}};
  try {
    out.theta = gamma_apply(mu, -state.nu_w, cfg.s, cap);
  } catch (const overflow_risk& e) {
    out.refusal = e.what();
  }
  return out;
}

}  // namespace gevrey_flow
