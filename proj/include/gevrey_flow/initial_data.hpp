#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "gevrey_flow/norms.hpp"
#include "gevrey_flow/spectral_field.hpp"

namespace gevrey_flow {

/// Zero-mean real field with f^(k) = (X + iY) amplitude e^{-decay |k|},
/// X, Y standard normal, Hermitian completion. Deterministic in seed.
inline SpectralField random_analytic_field(const Lattice& lat, std::uint64_t seed, double decay,
                                           double amplitude = 1.0) {
  if (!(decay >= 0.0)) throw std::invalid_argument("random_analytic_field: decay must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(lat);
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const Mode k = lat.mode(i);
    // one representative per +-k pair
    if (!(k.k1 > 0 || (k.k1 == 0 && k.k2 > 0))) continue;
    const double x = normal(rng);
    const double y = normal(rng);
    f.set_hermitian(k, amplitude * std::exp(-decay * k.norm()) * cplx{x, y});
  }
  return f;
}

/// f rescaled so that gevrey_norm(f, spec) equals target.
inline SpectralField scale_to_norm(SpectralField f, const GevreyNormSpec& spec, double target) {
  const double n = gevrey_norm(f, spec);
  if (n == 0.0) throw std::invalid_argument("scale_to_norm: field has zero norm");
  f *= target / n;
  return f;
}

/// amplitude cos(k.x): coefficients amplitude (2 pi)^d / 2 at +-k.
inline SpectralField cosine_field(const Lattice& lat, Mode k, double amplitude) {
  if (k.is_zero()) throw std::invalid_argument("cosine_field: k must be nonzero");
  SpectralField f(lat);
  f.set_hermitian(k, 0.5 * amplitude * torus_volume(lat.dim()));
  return f;
}

}  // namespace gevrey_flow
