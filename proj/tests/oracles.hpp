#pragma once

// Slow reference computations written independently of the library: plain
// maps over modes, separate exponentials, no FFT, no shared helpers beyond
// the field container itself.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <vector>

#include "gevrey_flow/spectral_field.hpp"

namespace oracle {

using gevrey_flow::cplx;
using gevrey_flow::Mode;
using gevrey_flow::SpectralField;

inline constexpr double pi = std::numbers::pi;

inline double volume(int d) { return std::pow(2.0 * pi, d); }

inline double euclid(Mode k) { return std::hypot(double(k.k1), double(k.k2)); }

inline std::map<Mode, cplx> as_map(const SpectralField& f) {
  std::map<Mode, cplx> m;
  const int K = f.lattice().cutoff();
  const int K2 = f.lattice().dim() == 2 ? K : 0;
  for (int a = -K; a <= K; ++a) {
    for (int b = -K2; b <= K2; ++b) m[{a, b}] = f.coeff({a, b});
  }
  return m;
}

/// sum_k |k|^{r e} |f^(k)|^r, summed in reverse mode order.
inline double fl_norm(const SpectralField& f, double exponent, double r) {
  const auto m = as_map(f);
  double acc = 0.0;
  for (auto it = m.rbegin(); it != m.rend(); ++it) {
    const double w = it->first.is_zero() ? (exponent == 0.0 ? 1.0 : 0.0)
                                         : std::pow(euclid(it->first), exponent);
    acc += std::pow(w * std::abs(it->second), r);
  }
  return std::pow(acc, 1.0 / r);
}

/// (2 pi)^{-d} sum_j f^(k - j) g^(j), truncated to the lattice of f.
inline SpectralField convolution(const SpectralField& f, const SpectralField& g) {
  const auto fm = as_map(f);
  const auto gm = as_map(g);
  const int d = f.lattice().dim();
  SpectralField out(f.lattice(), gevrey_flow::Reality::complex);
  for (const auto& [k, unused] : fm) {
    (void)unused;
    cplx acc = 0.0;
    for (const auto& [j, gj] : gm) {
      const auto it = fm.find(k - j);
      if (it != fm.end()) acc += it->second * gj;
    }
    out.set(k, acc / volume(d));
  }
  return out;
}

/// Point value (2 pi)^{-d} sum_k f^(k) e^{i k.x}.
inline cplx eval(const SpectralField& f, double x1, double x2 = 0.0) {
  cplx acc = 0.0;
  for (const auto& [k, c] : as_map(f)) acc += c * std::exp(cplx(0.0, k.k1 * x1 + k.k2 * x2));
  return acc / volume(f.lattice().dim());
}

/// B(f, g) from the spectral formula with three separate exponentials and a
/// power-law kernel amplitude |j|^{-gamma}. M is row-major d x d.
inline SpectralField bilinear(const SpectralField& f, const SpectralField& g, double tau, double s,
                              double gamma, double amplitude, const std::vector<double>& M) {
  const auto fm = as_map(f);
  const auto gm = as_map(g);
  const int d = f.lattice().dim();
  const auto Mj = [&](Mode j) -> std::pair<double, double> {
    if (d == 1) return {M[0] * j.k1, 0.0};
    return {M[0] * j.k1 + M[1] * j.k2, M[2] * j.k1 + M[3] * j.k2};
  };
  SpectralField out(f.lattice(), gevrey_flow::Reality::complex);
  for (const auto& [k, unused] : fm) {
    (void)unused;
    cplx acc = 0.0;
    for (const auto& [j, gj] : gm) {
      if (j.is_zero()) continue;
      const auto it = fm.find(k - j);
      if (it == fm.end()) continue;
      const auto [m1, m2] = Mj(j);
      const double kMj = k.k1 * m1 + k.k2 * m2;
      const double ghat = amplitude * std::pow(euclid(j), -gamma);
      const double lift_f = std::exp(tau * std::pow(euclid(k - j), s));
      const double lift_g = std::exp(tau * std::pow(euclid(j), s));
      acc += kMj * ghat * lift_f * it->second * lift_g * gj;
    }
    const double damp = k.is_zero() ? 1.0 : std::exp(-tau * std::pow(euclid(k), s));
    out.set(k, -damp * acc / volume(d));
  }
  return out;
}

/// nu^2/2 - beta |k|^{-s} - Re(k.Mk) |k|^{-2s} amplitude |k|^{-gamma}, minimized
/// over the full box |k|_inf <= R (no symmetry reduction).
inline double zeta_box_min(int d, double nu, double beta, double s, double gamma, double amplitude,
                           const std::vector<double>& M, int R) {
  double best = INFINITY;
  const int R2 = d == 2 ? R : 0;
  for (int a = -R; a <= R; ++a) {
    for (int b = -R2; b <= R2; ++b) {
      if (a == 0 && b == 0) continue;
      const double n = std::hypot(double(a), double(b));
      const double kMk = d == 1 ? M[0] * a * a : a * (M[0] * a + M[1] * b) + b * (M[2] * a + M[3] * b);
      const double v = 0.5 * nu * nu - beta * std::pow(n, -s) -
                       kMk * amplitude * std::pow(n, -gamma) * std::pow(n, -2.0 * s);
      best = std::min(best, v);
    }
  }
  return best;
}

}  // namespace oracle
