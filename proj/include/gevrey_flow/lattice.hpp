#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace gevrey_flow {

/// Integer wave vector k in Z^d. For d = 1 the second component stays 0.
struct Mode {
  int k1 = 0;
  int k2 = 0;

  friend constexpr bool operator==(const Mode&, const Mode&) = default;
  friend constexpr auto operator<=>(const Mode&, const Mode&) = default;

  constexpr Mode operator-() const { return {-k1, -k2}; }
  constexpr Mode operator+(Mode o) const { return {k1 + o.k1, k2 + o.k2}; }
  constexpr Mode operator-(Mode o) const { return {k1 - o.k1, k2 - o.k2}; }

  constexpr bool is_zero() const { return k1 == 0 && k2 == 0; }
  constexpr long long norm_sq() const {
    return static_cast<long long>(k1) * k1 + static_cast<long long>(k2) * k2;
  }
  double norm() const { return std::sqrt(static_cast<double>(norm_sq())); }
  constexpr int max_norm() const {
    const int a = k1 < 0 ? -k1 : k1;
    const int b = k2 < 0 ? -k2 : k2;
    return a > b ? a : b;
  }
};

/// |k|^p for k != 0, with |k| the Euclidean norm. Returns 0 at k = 0;
/// callers that need a different zero-mode convention handle it themselves.
inline double abs_pow(Mode k, double p) {
  if (k.is_zero()) return 0.0;
  return std::pow(static_cast<double>(k.norm_sq()), 0.5 * p);
}

/// Truncated integer lattice {k in Z^d : |k|_inf <= K} on the d-torus.
///
/// Modes are stored row-major: index = (k1 + K) for d = 1 and
/// (k1 + K) * (2K + 1) + (k2 + K) for d = 2.
class Lattice {
 public:
  Lattice(int dim, int cutoff) : dim_(dim), cutoff_(cutoff) {
    if (dim != 1 && dim != 2) {
      throw std::invalid_argument("Lattice: dimension must be 1 or 2, got " +
                                  std::to_string(dim));
    }
    if (cutoff < 1) {
      throw std::invalid_argument("Lattice: cutoff K must be >= 1, got " +
                                  std::to_string(cutoff));
    }
  }

  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  std::size_t side() const { return static_cast<std::size_t>(2 * cutoff_ + 1); }
  std::size_t size() const { return dim_ == 1 ? side() : side() * side(); }

  bool contains(Mode k) const {
    return k.max_norm() <= cutoff_ && (dim_ == 2 || k.k2 == 0);
  }

  std::size_t index(Mode k) const {
    const auto a = static_cast<std::size_t>(k.k1 + cutoff_);
    if (dim_ == 1) return a;
    return a * side() + static_cast<std::size_t>(k.k2 + cutoff_);
  }

  Mode mode(std::size_t i) const {
    if (dim_ == 1) return {static_cast<int>(i) - cutoff_, 0};
    const auto n = side();
    return {static_cast<int>(i / n) - cutoff_, static_cast<int>(i % n) - cutoff_};
  }

  /// Largest Euclidean |k| on the lattice.
  double max_wavenumber() const { return cutoff_ * std::sqrt(static_cast<double>(dim_)); }

  /// Cutoff retained by the 2/3 dealiasing rule.
  int dealias_cutoff() const { return (2 * cutoff_) / 3; }

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  int dim_;
  int cutoff_;
};

}  // namespace gevrey_flow
