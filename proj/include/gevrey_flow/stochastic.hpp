#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gevrey_flow/parallel.hpp"

namespace gevrey_flow {

/// splitmix64 step; used to derive independent per-path seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of path i in a batch started from `seed`.
inline std::uint64_t path_seed(std::uint64_t seed, std::uint64_t i) {
  return splitmix64(seed ^ splitmix64(i));
}

/// W sampled on the uniform grid t_i = i dt, i = 0..n, with W(0) = 0.
class BrownianPath {
 public:
  BrownianPath(double dt, std::vector<double> values, std::uint64_t seed = 0)
      : dt_(dt), values_(std::move(values)), seed_(seed) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("BrownianPath: dt must be > 0");
    if (values_.empty() || values_.front() != 0.0) {
      throw std::invalid_argument("BrownianPath: W(0) must be 0");
    }
  }

  /// W = 0 on [0, horizon].
  static BrownianPath zero(double horizon, double dt) {
    return BrownianPath(dt, std::vector<double>(steps_for(horizon, dt) + 1, 0.0));
  }

  double dt() const { return dt_; }
  std::size_t steps() const { return values_.size() - 1; }
  double horizon() const { return dt_ * static_cast<double>(steps()); }
  std::uint64_t seed() const { return seed_; }
  double time(std::size_t i) const { return dt_ * static_cast<double>(i); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  /// Grid index of time t; t must be a grid point (relative slack 1e-9).
  std::size_t index_of(double t) const {
    const double x = t / dt_;
    const double r = std::round(x);
    if (r < 0.0 || std::abs(x - r) > 1e-9 * std::max(1.0, r) || r > static_cast<double>(steps())) {
      throw std::out_of_range("BrownianPath: t = " + std::to_string(t) +
                              " is not a grid point within the horizon " +
                              std::to_string(horizon()));
    }
    return static_cast<std::size_t>(r);
  }

  double at(double t) const { return values_[index_of(t)]; }

  static std::size_t steps_for(double horizon, double dt) {
    if (!(horizon > 0.0) || !(dt > 0.0)) {
      throw std::invalid_argument("BrownianPath: horizon and dt must be > 0");
    }
    return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  }

 private:
  double dt_;
  std::vector<double> values_;
  std::uint64_t seed_;
};

/// Exact Gaussian increments of variance dt; deterministic in seed.
inline BrownianPath sample_path(double horizon, double dt, std::uint64_t seed) {
  const std::size_t n = BrownianPath::steps_for(horizon, dt);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  std::vector<double> w(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) w[i] = w[i - 1] + normal(rng);
  return BrownianPath(dt, std::move(w), seed);
}

/// W_m(t) = sqrt(m) W(t / m), on the grid of spacing m dt.
inline BrownianPath rescale_path(const BrownianPath& path, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("rescale_path: m must be > 0");
  std::vector<double> w = path.values();
  if (m != 1.0) {
    const double c = std::sqrt(m);
    for (auto& v : w) v *= c;
  }
  return BrownianPath(path.dt() * m, std::move(w), path.seed());
}

struct OmegaVerdict {
  bool member = false;
  double survival_prob_given_grid = 0.0;
  /// First grid time where the discrete check fails (member = false).
  double first_violation = std::numeric_limits<double>::quiet_NaN();
};

/// Discrete check of alpha + beta t - nu W(t) >= 0 on the grid, with the
/// Brownian-bridge non-crossing probability of the linear barrier per interval.
inline OmegaVerdict omega_verdict(const BrownianPath& path, double alpha, double beta, double nu) {
  if (!(alpha > 0.0) || !(beta >= 0.0) || !(nu > 0.0)) {
    throw std::invalid_argument("omega_verdict: need alpha > 0, beta >= 0, nu > 0");
  }
  OmegaVerdict v;
  const double dt = path.dt();
  double survival = 1.0;
  double prev = alpha / nu - path[0];
  for (std::size_t i = 1; i <= path.steps(); ++i) {
    const double d = (alpha + beta * path.time(i)) / nu - path[i];
    if (d < 0.0) {
      v.first_violation = path.time(i);
      return v;
    }
    survival *= -std::expm1(-2.0 * prev * d / dt);
    prev = d;
  }
  v.member = true;
  v.survival_prob_given_grid = survival;
  return v;
}

struct OmegaMcResult {
  double estimate = 0.0;
  double standard_error = 0.0;
  double discrete_estimate = 0.0;  // fraction passing the grid check alone
  std::size_t n_paths = 0;
  double dt = 0.0;
  double horizon = 0.0;        // horizon actually used
  double tail_bound = 0.0;     // e^{-2 (alpha + beta horizon) beta / nu^2}
  std::uint64_t seed = 0;
  int horizon_extensions = 0;
};

/// Post-horizon crossing bound: the barrier restarted at `horizon` has
/// intercept alpha + beta horizon.
inline double omega_tail_bound(double alpha, double beta, double nu, double horizon) {
  return std::exp(-2.0 * (alpha + beta * horizon) * beta / (nu * nu));
}

/// Mean of the bridge-corrected survival probabilities over n_paths
/// independent paths. The horizon is extended (and the batch rerun with the
/// same per-path seeds) until the tail bound is at most 0.1 standard errors;
/// the standard error is floored at 1/n so degenerate batches terminate.
inline OmegaMcResult omega_probability_mc(double alpha, double beta, double nu,
                                          std::size_t n_paths, double horizon, double dt,
                                          std::uint64_t seed, unsigned threads = worker_count()) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(nu > 0.0)) {
    throw std::invalid_argument("omega_probability_mc: alpha, beta, nu must be > 0");
  }
  if (n_paths < 2) throw std::invalid_argument("omega_probability_mc: need n_paths >= 2");
  if (!(horizon > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("omega_probability_mc: horizon and dt must be > 0");
  }
  OmegaMcResult out;
  out.n_paths = n_paths;
  out.dt = dt;
  out.seed = seed;
  std::vector<double> survival(n_paths);
  std::vector<char> member(n_paths);
  constexpr int max_extensions = 5;
  for (int round = 0;; ++round) {
    parallel_for(
        n_paths,
        [&](std::size_t i) {
          const auto v = omega_verdict(sample_path(horizon, dt, path_seed(seed, i)), alpha, beta, nu);
          survival[i] = v.survival_prob_given_grid;
          member[i] = v.member ? 1 : 0;
        },
        threads);
    double sum = 0.0;
    double passed = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
      sum += survival[i];
      passed += member[i];
    }
    const double n = static_cast<double>(n_paths);
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : survival) ss += (x - mean) * (x - mean);
    out.estimate = mean;
    out.standard_error = std::sqrt(ss / (n - 1.0) / n);
    out.discrete_estimate = passed / n;
    out.horizon = horizon;
    out.tail_bound = omega_tail_bound(alpha, beta, nu, horizon);
    out.horizon_extensions = round;

    const double target = 0.1 * std::max(out.standard_error, 1.0 / n);
    if (out.tail_bound <= target || round == max_extensions) return out;
    // Smallest horizon meeting the target, with a 10% margin.
    const double needed = (nu * nu * std::log(1.0 / target) / (2.0 * beta) - alpha) / beta;
    horizon = std::max(horizon * 1.1, needed * 1.1);
  }
}

}  // namespace gevrey_flow
