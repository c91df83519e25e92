#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "gevrey_flow/errors.hpp"
#include "gevrey_flow/spectral_field.hpp"

namespace gevrey_flow {

/// Summability exponent r in [1, inf]. Infinity is a separate state rather
/// than a floating-point sentinel.
class Summability {
 public:
  static Summability finite(double r) {
    if (!(r >= 1.0) || !std::isfinite(r)) {
      throw std::invalid_argument("Summability: r must be a finite value >= 1, got " +
                                  std::to_string(r));
    }
    return Summability(false, r);
  }
  static Summability infinity() { return Summability(true, 0.0); }

  bool is_infinite() const { return infinite_; }
  /// Finite exponent; undefined for infinity.
  double value() const { return value_; }

  /// 1/r, with 1/inf = 0.
  double reciprocal() const { return infinite_ ? 0.0 : 1.0 / value_; }

  std::string to_string() const {
    if (infinite_) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", value_);
    return buf;
  }

  friend bool operator==(const Summability&, const Summability&) = default;

 private:
  Summability(bool inf, double r) : infinite_(inf), value_(r) {}
  bool infinite_;
  double value_;
};

/// Parameters of the Gevrey norm ||e^{a |grad|^s} f|| in the Fourier-Lebesgue
/// space with exponent kappa * s and summability r.
struct GevreyNormSpec {
  double a = 0.0;
  double kappa = 0.0;
  Summability r = Summability::finite(1.0);
  double s = 1.0;

  void validate() const {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("GevreyNormSpec: radius a must be >= 0");
    }
    if (!std::isfinite(kappa)) throw std::invalid_argument("GevreyNormSpec: kappa must be finite");
    if (!(s > 0.5 && s <= 1.0)) {
      throw std::invalid_argument("GevreyNormSpec: s must lie in (1/2, 1]");
    }
  }
};

/// Exponents of e larger than this are refused.
inline constexpr double default_overflow_cap = 700.0;

namespace detail {

// ell^r norm of the nonnegative values produced by weight(i), rescaled by the
// maximum so that large r neither overflows nor underflows.
template <class WeightFn>
double scaled_lr_norm(std::size_t n, Summability r, WeightFn&& weight) {
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, weight(i));
  if (r.is_infinite() || peak == 0.0) return peak;
  const double p = r.value();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weight(i);
    if (w != 0.0) sum += std::pow(w / peak, p);
  }
  return peak * std::pow(sum, 1.0 / p);
}

// |k|^exponent with the zero-mode convention |0|^e = 0 for e > 0, 1 for e = 0.
inline double symbol_weight(Mode k, double exponent) {
  if (k.is_zero()) return exponent == 0.0 ? 1.0 : 0.0;
  if (exponent == 0.0) return 1.0;
  return abs_pow(k, exponent);
}

inline void check_zero_mode(const SpectralField& f, double exponent) {
  if (exponent < 0.0 && f.coeff({0, 0}) != cplx{0.0, 0.0}) {
    throw zero_mode_singularity("negative exponent with nonzero f^(0)");
  }
}

}  // namespace detail

/// ||f||_{W^{exponent, r}} = || |k|^exponent f^(k) ||_{ell^r}.
inline double fourier_lebesgue_norm(const SpectralField& f, double exponent, Summability r) {
  if (!f.all_finite()) throw invalid_field("non-finite coefficient");
  detail::check_zero_mode(f, exponent);
  const Lattice& lat = f.lattice();
  return detail::scaled_lr_norm(f.size(), r, [&](std::size_t i) {
    const Mode k = lat.mode(i);
    if (k.is_zero() && exponent < 0.0) return 0.0;
    return detail::symbol_weight(k, exponent) * std::abs(f[i]);
  });
}

/// Refuses radii for which e^{a |k|^s} would exceed e^{cap} on the lattice.
inline void check_gevrey_overflow(const Lattice& lat, double a, double s,
                                  double cap = default_overflow_cap) {
  const double exponent = a * std::pow(lat.max_wavenumber(), s);
  if (exponent > cap) {
    throw overflow_risk("Gevrey weight exponent " + std::to_string(exponent) +
                        " exceeds cap " + std::to_string(cap));
  }
}

/// ||e^{a A^{1/2}} f||_{W^{kappa s, r}} with A = |grad|^{2s}.
inline double gevrey_norm(const SpectralField& f, const GevreyNormSpec& spec) {
  spec.validate();
  if (!f.all_finite()) throw invalid_field("non-finite coefficient");
  check_gevrey_overflow(f.lattice(), spec.a, spec.s);
  const double exponent = spec.kappa * spec.s;
  detail::check_zero_mode(f, exponent);
  const Lattice& lat = f.lattice();
  return detail::scaled_lr_norm(f.size(), spec.r, [&](std::size_t i) {
    const Mode k = lat.mode(i);
    if (k.is_zero()) {
      return exponent == 0.0 ? std::abs(f[i]) : 0.0;
    }
    return detail::symbol_weight(k, exponent) * std::exp(spec.a * abs_pow(k, spec.s)) *
           std::abs(f[i]);
  });
}

}  // namespace gevrey_flow
