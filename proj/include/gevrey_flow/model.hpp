#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gevrey_flow/errors.hpp"
#include "gevrey_flow/lattice.hpp"
#include "gevrey_flow/norms.hpp"
#include "gevrey_flow/spectral_field.hpp"

namespace gevrey_flow {

/// Fourier symbol g^(k) of the interaction potential, with g^(0) := 0.
///
/// Either the power law c |k|^{-gamma}, or a finite table of Hermitian values
/// (zero off the table). bound_constant() is C_g in |g^(k)| <= C_g |k|^{-gamma}.
class InteractionKernel {
 public:
  enum class Form { power_law, tabulated };

  static InteractionKernel power_law(double gamma, double amplitude = 1.0) {
    if (!(gamma > 0.0)) throw std::invalid_argument("InteractionKernel: gamma must be > 0");
    if (!std::isfinite(amplitude)) {
      throw std::invalid_argument("InteractionKernel: amplitude must be finite");
    }
    InteractionKernel g;
    g.form_ = Form::power_law;
    g.gamma_ = gamma;
    g.amplitude_ = amplitude;
    g.bound_ = std::abs(amplitude);
    return g;
  }

  static InteractionKernel tabulated(double gamma, std::map<Mode, cplx> table) {
    if (!(gamma > 0.0)) throw std::invalid_argument("InteractionKernel: gamma must be > 0");
    table.erase(Mode{0, 0});
    double bound = 0.0;
    double scale = 0.0;
    for (const auto& [k, v] : table) scale = std::max(scale, std::abs(v));
    for (const auto& [k, v] : table) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw std::invalid_argument("InteractionKernel: non-finite table entry");
      }
      auto it = table.find(-k);
      const cplx mirror = it == table.end() ? cplx{0.0, 0.0} : it->second;
      if (std::abs(mirror - std::conj(v)) > 1e-12 * scale) {
        throw std::invalid_argument("InteractionKernel: table is not Hermitian at (" +
                                    std::to_string(k.k1) + "," + std::to_string(k.k2) + ")");
      }
      bound = std::max(bound, std::abs(v) * abs_pow(k, gamma));
    }
    InteractionKernel g;
    g.form_ = Form::tabulated;
    g.gamma_ = gamma;
    g.table_ = std::move(table);
    g.bound_ = bound;
    return g;
  }

  cplx operator()(Mode k) const {
    if (k.is_zero()) return {0.0, 0.0};
    if (form_ == Form::power_law) return {amplitude_ * abs_pow(k, -gamma_), 0.0};
    auto it = table_.find(k);
    return it == table_.end() ? cplx{0.0, 0.0} : it->second;
  }

  Form form() const { return form_; }
  double gamma() const { return gamma_; }
  double amplitude() const { return amplitude_; }
  const std::map<Mode, cplx>& table() const { return table_; }

  /// C_g = sup_k |g^(k)| |k|^gamma (exact for both forms).
  double bound_constant() const { return bound_; }

  /// max over the nonzero lattice modes of |g^(k)| |k|^gamma.
  double bound_constant_on(const Lattice& lat) const {
    double c = 0.0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
      const Mode k = lat.mode(i);
      if (!k.is_zero()) c = std::max(c, std::abs((*this)(k)) * abs_pow(k, gamma_));
    }
    return c;
  }

 private:
  InteractionKernel() = default;
  Form form_ = Form::power_law;
  double gamma_ = 1.0;
  double amplitude_ = 1.0;
  double bound_ = 0.0;
  std::map<Mode, cplx> table_;
};

/// Constant real d x d interaction matrix M (row-major).
class InteractionMatrix {
 public:
  InteractionMatrix(int dim, std::vector<double> entries) : dim_(dim) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("InteractionMatrix: d must be 1 or 2");
    if (entries.size() != static_cast<std::size_t>(dim * dim)) {
      throw std::invalid_argument("InteractionMatrix: expected " + std::to_string(dim * dim) +
                                  " entries");
    }
    for (double v : entries) {
      if (!std::isfinite(v)) throw std::invalid_argument("InteractionMatrix: non-finite entry");
    }
    std::copy(entries.begin(), entries.end(), m_.begin());
  }

  static InteractionMatrix scalar(int dim, double value) {
    return dim == 1 ? InteractionMatrix(1, {value}) : InteractionMatrix(2, {value, 0, 0, value});
  }
  /// Rotation by pi/2 in the plane.
  static InteractionMatrix rotation() { return InteractionMatrix(2, {0.0, -1.0, 1.0, 0.0}); }

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return m_[static_cast<std::size_t>(i * dim_ + j)]; }
  std::vector<double> entries() const {
    return {m_.begin(), m_.begin() + dim_ * dim_};
  }

  /// M j as a vector.
  std::array<double, 2> apply(Mode j) const {
    if (dim_ == 1) return {m_[0] * j.k1, 0.0};
    return {m_[0] * j.k1 + m_[1] * j.k2, m_[2] * j.k1 + m_[3] * j.k2};
  }

  /// k . M j
  double bilinear(Mode k, Mode j) const {
    const auto mj = apply(j);
    return k.k1 * mj[0] + k.k2 * mj[1];
  }

  /// k . M k
  double quadratic(Mode k) const { return bilinear(k, k); }

  /// Operator 2-norm |M| (largest singular value).
  double operator_norm() const {
    if (dim_ == 1) return std::abs(m_[0]);
    const double a = m_[0], b = m_[1], c = m_[2], d = m_[3];
    const double frob = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double disc = std::max(0.0, frob * frob - 4.0 * det * det);
    return std::sqrt(0.5 * (frob + std::sqrt(disc)));
  }

  /// |(M + M^T)/2|; only the symmetric part enters k . M k.
  double symmetric_part_norm() const {
    if (dim_ == 1) return std::abs(m_[0]);
    const double a = m_[0], b = 0.5 * (m_[1] + m_[2]), d = m_[3];
    const double mean = 0.5 * (a + d);
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    return std::max(std::abs(mean + rad), std::abs(mean - rad));
  }

  bool is_antisymmetric() const {
    if (dim_ == 1) return m_[0] == 0.0;
    return m_[0] == 0.0 && m_[3] == 0.0 && m_[1] == -m_[2];
  }
  bool is_symmetric() const { return dim_ == 1 || m_[1] == m_[2]; }

  InteractionMatrix negated() const {
    auto e = entries();
    for (auto& v : e) v = -v;
    return InteractionMatrix(dim_, e);
  }

 private:
  int dim_;
  std::array<double, 4> m_{};
};

/// Every parameter of the transformed equation for rho = mu - mass.
///
/// `mass` is the spatial mean of mu; the linear operator carries it as
/// mass * L. The standard normalization is mass = 1.
struct ModelConfig {
  int d = 1;
  double s = 1.0;
  double nu = 1.0;
  double alpha = 0.1;
  double beta = 0.1;
  double epsilon = 0.0;
  double mass = 1.0;
  InteractionMatrix matrix = InteractionMatrix::scalar(1, -1.0);
  InteractionKernel kernel = InteractionKernel::power_law(2.0);

  double gamma() const { return kernel.gamma(); }

  void validate() const {
    if (d != 1 && d != 2) throw std::invalid_argument("ModelConfig: d must be 1 or 2");
    if (matrix.dim() != d) throw std::invalid_argument("ModelConfig: matrix dimension != d");
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("ModelConfig: s must lie in (0, 1]");
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw std::invalid_argument("ModelConfig: nu must be >= 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw std::invalid_argument("ModelConfig: alpha must be >= 0");
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
      throw std::invalid_argument("ModelConfig: beta must be >= 0");
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
      throw std::invalid_argument("ModelConfig: epsilon must be >= 0");
    }
    if (!(mass > 0.0) || !std::isfinite(mass)) {
      throw std::invalid_argument("ModelConfig: mass must be > 0");
    }
  }

  /// max(1/2, (2 - gamma)/2) < s <= 1.
  bool in_theorem_window() const {
    return s > std::max(0.5, 0.5 * (2.0 - gamma())) && s <= 1.0;
  }

  /// Non-fatal hypothesis violations, for exploratory runs.
  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    if (!in_theorem_window()) w.push_back("s outside (max(1/2, (2-gamma)/2), 1]");
    if (nu == 0.0) w.push_back("nu = 0: no random diffusion");
    return w;
  }
};

/// Symbol of nu^2 A / 2 + mass L: m(k) = nu^2 |k|^{2s} / 2 - mass (k . M k) g^(k).
inline cplx linear_symbol(Mode k, const ModelConfig& cfg) {
  if (k.is_zero()) return {0.0, 0.0};
  const double diffusion = 0.5 * cfg.nu * cfg.nu * abs_pow(k, 2.0 * cfg.s);
  return cplx{diffusion, 0.0} - cfg.mass * cfg.matrix.quadratic(k) * cfg.kernel(k);
}

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
  bool contains(double v) const { return lower <= v && v <= upper; }
};

/// inf over k != 0 of nu^2/2 - beta |k|^{-s} - mass Re(g^(k) |k|^{-2s} (k . M k)),
/// reduced to a finite enumeration plus a certified tail bracket.
struct ZetaResult {
  double value = 0.0;        // upper end of the bracket
  Bracket bracket;
  double search_radius = 0;  // Euclidean radius R of the enumerated region
  std::optional<Mode> minimizer;  // set when the infimum is attained inside |k| <= R
  bool tolerance_met = false;
};

namespace detail {

inline double zeta_term(Mode k, const ModelConfig& cfg) {
  const double kernel_term =
      cfg.mass * (cfg.kernel(k) * cfg.matrix.quadratic(k)).real() * abs_pow(k, -2.0 * cfg.s);
  return 0.5 * cfg.nu * cfg.nu - cfg.beta * abs_pow(k, -cfg.s) - kernel_term;
}

inline double lambda_term(Mode k, const ModelConfig& cfg) {
  if (k.is_zero()) return 0.0;
  return cfg.beta * abs_pow(k, cfg.s) +
         cfg.mass * (cfg.kernel(k) * cfg.matrix.quadratic(k)).real() -
         0.5 * cfg.nu * cfg.nu * abs_pow(k, 2.0 * cfg.s);
}

// C_g |sym(M)| mass: bound on |Re(g^(k) k.Mk)| |k|^{gamma - 2}.
inline double kernel_tail_constant(const ModelConfig& cfg) {
  return cfg.mass * cfg.kernel.bound_constant() * cfg.matrix.symmetric_part_norm();
}

// Visits nonzero modes of the half space (one of each +-k pair) with
// r_inner^2 < |k|^2 <= r_outer^2. Both expressions are even in k.
template <class Fn>
void for_each_half_shell(int d, long long r_inner_sq, long long r_outer_sq, Fn&& fn) {
  const auto r_outer = static_cast<int>(std::floor(std::sqrt(static_cast<double>(r_outer_sq))));
  if (d == 1) {
    for (int k = 1; k <= r_outer; ++k) {
      const long long n = static_cast<long long>(k) * k;
      if (n > r_inner_sq && n <= r_outer_sq) fn(Mode{k, 0});
    }
    return;
  }
  for (int k1 = 0; k1 <= r_outer; ++k1) {
    const long long rem = r_outer_sq - static_cast<long long>(k1) * k1;
    const auto k2max = static_cast<int>(std::floor(std::sqrt(static_cast<double>(rem))));
    for (int k2 = (k1 == 0 ? 1 : -k2max); k2 <= k2max; ++k2) {
      const Mode k{k1, k2};
      const long long n = k.norm_sq();
      if (n > r_inner_sq && n <= r_outer_sq) fn(k);
    }
  }
}

inline void require_zeta_tail(const ModelConfig& cfg) {
  const double p = 2.0 * cfg.s - 2.0 + cfg.gamma();
  if (!(p > 0.0)) {
    throw tail_not_controllable("2s <= 2 - gamma (s = " + std::to_string(cfg.s) +
                                ", gamma = " + std::to_string(cfg.gamma()) + ")");
  }
}

inline double zeta_tail_width(const ModelConfig& cfg, double radius) {
  const double p = 2.0 * cfg.s - 2.0 + cfg.gamma();
  return cfg.beta * std::pow(radius, -cfg.s) + kernel_tail_constant(cfg) * std::pow(radius, -p);
}

}  // namespace detail

/// Zeta bracket after enumerating every mode with |k| <= radius.
inline ZetaResult zeta_at_radius(const ModelConfig& cfg, int radius) {
  cfg.validate();
  detail::require_zeta_tail(cfg);
  if (radius < 1) throw std::invalid_argument("zeta_at_radius: radius must be >= 1");
  double finite_min = std::numeric_limits<double>::infinity();
  Mode argmin{};
  const long long r2 = static_cast<long long>(radius) * radius;
  detail::for_each_half_shell(cfg.d, 0, r2, [&](Mode k) {
    const double v = detail::zeta_term(k, cfg);
    if (v < finite_min) {
      finite_min = v;
      argmin = k;
    }
  });
  const double limit = 0.5 * cfg.nu * cfg.nu;
  const double tail_lower = limit - detail::zeta_tail_width(cfg, radius);
  ZetaResult out;
  out.search_radius = radius;
  if (finite_min <= tail_lower) {
    out.bracket = {finite_min, finite_min};
    out.minimizer = argmin;
  } else {
    out.bracket = {tail_lower, std::min(finite_min, limit)};
    if (finite_min <= limit) out.minimizer = argmin;
  }
  out.value = out.bracket.upper;
  return out;
}

/// Doubles the search radius until the bracket is narrower than tol or the
/// enumeration cap is hit (then tolerance_met = false).
inline ZetaResult compute_zeta(const ModelConfig& cfg, double tol = 1e-9) {
  cfg.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("compute_zeta: tol must be > 0");
  detail::require_zeta_tail(cfg);
  const int cap = cfg.d == 1 ? (1 << 24) : (1 << 11);
  const double limit = 0.5 * cfg.nu * cfg.nu;

  double finite_min = std::numeric_limits<double>::infinity();
  Mode argmin{};
  long long inner = 0;
  int radius = 8;
  for (;;) {
    const long long outer = static_cast<long long>(radius) * radius;
    detail::for_each_half_shell(cfg.d, inner, outer, [&](Mode k) {
      const double v = detail::zeta_term(k, cfg);
      if (v < finite_min) {
        finite_min = v;
        argmin = k;
      }
    });
    inner = outer;
    const double width = detail::zeta_tail_width(cfg, radius);
    const bool exact = finite_min <= limit - width;
    if (exact || width <= tol || radius >= cap) {
      ZetaResult out;
      out.search_radius = radius;
      if (exact) {
        out.bracket = {finite_min, finite_min};
        out.minimizer = argmin;
      } else {
        out.bracket = {limit - width, std::min(finite_min, limit)};
        if (finite_min <= limit) out.minimizer = argmin;
      }
      out.value = out.bracket.upper;
      out.tolerance_met = out.bracket.width() <= tol;
      return out;
    }
    radius *= 2;
  }
}

/// lambda = sup_k (beta |k|^s + mass Re(g^(k) M k.k) - nu^2 |k|^{2s}/2) and
/// |k0| = largest |k| where that expression is >= 0. Both are exact: the
/// search radius is grown until the expression is certified negative beyond it.
struct LambdaK0 {
  double lambda = 0.0;
  double k0 = 0.0;
  Mode argmax{};
  double search_radius = 0.0;
};

inline LambdaK0 compute_lambda_k0(const ModelConfig& cfg) {
  cfg.validate();
  const double p = 2.0 * cfg.s - 2.0 + cfg.gamma();
  const double c = detail::kernel_tail_constant(cfg);
  if (c > 0.0 && !(p > 0.0)) {
    throw tail_not_controllable("2s <= 2 - gamma");
  }
  if (!(cfg.nu > 0.0)) {
    if (cfg.beta > 0.0 || c > 0.0) throw tail_not_controllable("nu = 0 leaves no dissipation");
  }
  // For |k| = rho > R: expression <= rho^{2s} (beta rho^{-s} + c rho^{-p} - nu^2/2),
  // and the bracket is decreasing in rho.
  const auto bound = [&](double rho) {
    return cfg.beta * std::pow(rho, -cfg.s) + c * std::pow(rho, -p) - 0.5 * cfg.nu * cfg.nu;
  };
  LambdaK0 out;
  if (cfg.nu == 0.0) return out;  // expression is identically 0 (beta = 0, no kernel term)
  int radius = 1;
  const int cap = cfg.d == 1 ? (1 << 26) : (1 << 12);
  while (bound(radius) >= 0.0) {
    if (radius >= cap) throw tail_not_controllable("search radius cap reached");
    radius *= 2;
  }
  out.search_radius = radius;
  const long long r2 = static_cast<long long>(radius) * radius;
  detail::for_each_half_shell(cfg.d, 0, r2, [&](Mode k) {
    const double v = detail::lambda_term(k, cfg);
    if (v > out.lambda) {
      out.lambda = v;
      out.argmax = k;
    }
    if (v >= 0.0) out.k0 = std::max(out.k0, k.norm());
  });
  return out;
}

/// P(alpha + beta t - nu W^t >= 0 for all t) = 1 - e^{-2 alpha beta / nu^2}.
inline double omega_probability_closed_form(double alpha, double beta, double nu) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(nu > 0.0)) {
    throw std::invalid_argument("omega_probability_closed_form: alpha, beta, nu must be > 0");
  }
  return -std::expm1(-2.0 * alpha * beta / (nu * nu));
}

struct AdmissibilityCondition {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AdmissibilityReport {
  std::vector<AdmissibilityCondition> conditions;

  bool all_passed() const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const auto& c) { return c.passed; });
  }
  const AdmissibilityCondition* find(const std::string& name) const {
    for (const auto& c : conditions) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
  bool passed(const std::string& name) const {
    const auto* c = find(name);
    return c != nullptr && c->passed;
  }
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// The r-dependent branch of the local well-posedness conditions. Returns the
// branch label that holds, or an empty string.
inline std::string lwp_summability_branch(int d, double gamma, double s, double sigma,
                                          Summability r) {
  const double ss = sigma * s;
  const bool low = 1.0 - gamma <= ss;
  if (!r.is_infinite() && r.value() == 1.0) return low ? "r=1" : "";
  // d (r - 1) / r, with the r = inf limit d.
  const double frac = d * (1.0 - r.reciprocal());
  if (frac < ss && low) return "p=1";
  if (1.0 - gamma + frac < ss) return "p=r";
  constexpr int grid = 1000;
  for (int i = 0; i < grid; ++i) {
    const double t = (i + 0.5) / grid;
    const double p = r.is_infinite() ? 1.0 / (1.0 - t) : 1.0 + (r.value() - 1.0) * t;
    // d (r - p) / (r p) = d (1/p - 1/r)
    const double first = d * (1.0 / p - r.reciprocal());
    const double second = 1.0 - gamma + d * (p - 1.0) / p;
    if (first < ss && second < ss) return "1<p<r (p=" + fmt_double(p) + ")";
  }
  return "";
}

}  // namespace detail

/// Evaluates each checkable hypothesis. Never throws for parameter values;
/// failures (including an uncomputable zeta) are reported as conditions.
inline AdmissibilityReport check_admissibility(const ModelConfig& cfg, double sigma, Summability r,
                                               double smallness_constant,
                                               std::optional<double> initial_norm = std::nullopt,
                                               double zeta_tol = 1e-9) {
  using detail::fmt_double;
  AdmissibilityReport rep;
  const double s = cfg.s;
  const double gamma = cfg.gamma();
  const double s_lo = std::max(0.5, 0.5 * (2.0 - gamma));
  rep.conditions.push_back({"s_window", s > s_lo && s <= 1.0,
                            "need " + fmt_double(s_lo) + " < s <= 1, s = " + fmt_double(s)});
  rep.conditions.push_back({"lwp1", s > 0.5 * (2.0 - gamma) && s <= 1.0,
                            "need (2-gamma)/2 = " + fmt_double(0.5 * (2.0 - gamma)) +
                                " < s <= 1"});
  const double sigma_hi = (2.0 * s - 1.0) / s;
  rep.conditions.push_back(
      {"sigma_window", sigma > 0.0 && sigma < sigma_hi && 1.0 - gamma <= sigma * s,
       "need 0 < sigma < (2s-1)/s = " + fmt_double(sigma_hi) + " and 1-gamma <= sigma s"});
  const std::string branch = detail::lwp_summability_branch(cfg.d, gamma, s, sigma, r);
  rep.conditions.push_back({"lwp2", !branch.empty(),
                            branch.empty() ? "no summability branch holds for r = " + r.to_string()
                                           : "branch " + branch});
  const double lwp3 = (sigma * s + 1.0) / (2.0 * s);
  rep.conditions.push_back(
      {"lwp3", lwp3 < 1.0, "(sigma s + 1)/(2s) = " + fmt_double(lwp3) + " must be < 1"});

  std::optional<double> zeta;
  try {
    const auto z = compute_zeta(cfg, zeta_tol);
    zeta = z.value;
    rep.conditions.push_back({"zeta_positive", z.bracket.lower > 0.0,
                              "zeta in [" + fmt_double(z.bracket.lower) + ", " +
                                  fmt_double(z.bracket.upper) + "]"});
  } catch (const std::exception& e) {
    rep.conditions.push_back({"zeta_positive", false, e.what()});
  }

  if (initial_norm) {
    const double mnorm = cfg.matrix.operator_norm();
    if (!zeta) {
      rep.conditions.push_back({"smallness", false, "zeta unavailable"});
    } else {
      const double threshold = mnorm == 0.0 ? std::numeric_limits<double>::infinity()
                                            : *zeta / (smallness_constant * mnorm);
      rep.conditions.push_back({"smallness", *initial_norm < threshold,
                                "||rho0|| = " + fmt_double(*initial_norm) +
                                    " vs zeta/(C|M|) = " + fmt_double(threshold)});
    }
  }
  return rep;
}

/// Time and amplitude maps relating mu (mean m) to mu_m^t = mu^{t/m} / m,
/// which solves the same equation with nu_m = nu / sqrt(m) along the path
/// W_m^t = sqrt(m) W^{t/m}.
struct MassRescaling {
  ModelConfig config;
  double m = 1.0;

  /// Original time corresponding to rescaled time t.
  double original_time(double t) const { return t / m; }
  double amplitude_divisor() const { return m; }
  double path_amplitude() const { return std::sqrt(m); }
};

inline MassRescaling rescale_mass(const ModelConfig& cfg, double m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("rescale_mass: m must be > 0");
  MassRescaling out{cfg, m};
  if (m != 1.0) {
    out.config.nu = cfg.nu / std::sqrt(m);
    out.config.mass = cfg.mass / m;
  }
  return out;
}

/// Every derived scalar of a configuration.
struct DerivedParams {
  ZetaResult zeta;
  std::optional<ZetaResult> zeta_opposite_sign;  // kernel term with the other sign
  std::optional<LambdaK0> lambda_k0;
  std::string lambda_error;
  std::optional<double> omega_prob;
  AdmissibilityReport admissibility;
};

inline DerivedParams compute_derived_params(const ModelConfig& cfg, double sigma, Summability r,
                                            double smallness_constant,
                                            std::optional<double> initial_norm = std::nullopt,
                                            double tol = 1e-9) {
  DerivedParams out;
  out.zeta = compute_zeta(cfg, tol);
  ModelConfig flipped = cfg;
  flipped.matrix = cfg.matrix.negated();
  out.zeta_opposite_sign = compute_zeta(flipped, tol);
  try {
    out.lambda_k0 = compute_lambda_k0(cfg);
  } catch (const std::exception& e) {
    out.lambda_error = e.what();
  }
  if (cfg.alpha > 0.0 && cfg.beta > 0.0 && cfg.nu > 0.0) {
    out.omega_prob = omega_probability_closed_form(cfg.alpha, cfg.beta, cfg.nu);
  }
  out.admissibility = check_admissibility(cfg, sigma, r, smallness_constant, initial_norm, tol);
  return out;
}

}  // namespace gevrey_flow
