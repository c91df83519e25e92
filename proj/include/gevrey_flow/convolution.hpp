#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gevrey_flow/errors.hpp"
#include "gevrey_flow/fft.hpp"
#include "gevrey_flow/spectral_field.hpp"

namespace gevrey_flow {

/// coeff_out(k) = m(k) coeff_in(k) for a symbol m : Mode -> complex.
///
/// The result is flagged real when the input is real and the symbol satisfies
/// m(-k) = conj m(k) on the lattice.
template <class Symbol>
SpectralField apply_multiplier(const SpectralField& f, Symbol&& symbol) {
  const Lattice& lat = f.lattice();
  std::vector<cplx> m(lat.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = cplx(symbol(lat.mode(i)));
    if (!std::isfinite(m[i].real()) || !std::isfinite(m[i].imag())) {
      throw invalid_field("multiplier symbol is not finite");
    }
    scale = std::max(scale, std::abs(m[i]));
  }
  bool hermitian = f.is_real();
  if (hermitian) {
    for (std::size_t i = 0; i < m.size() && hermitian; ++i) {
      const std::size_t j = lat.index(-lat.mode(i));
      hermitian = std::abs(m[j] - std::conj(m[i])) <= 1e-12 * scale;
    }
  }
  SpectralField out(lat, hermitian ? Reality::real : Reality::complex);
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] * f[i];
  return out;
}

/// Zeroes every mode with |k|_inf > floor(2K/3).
inline SpectralField dealias(const SpectralField& f) {
  const Lattice& lat = f.lattice();
  const int keep = lat.dealias_cutoff();
  SpectralField out = f;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (lat.mode(i).max_norm() > keep) out[i] = cplx{0.0, 0.0};
  }
  return out;
}

/// Fourier coefficients of the product f g, truncated to the lattice:
/// F(fg)(k) = (2 pi)^{-d} sum_j f^(k - j) g^(j). Direct O(K^{2d}) loop; this
/// is the reference against which the transform path is checked.
inline SpectralField convolve_product(const SpectralField& f, const SpectralField& g) {
  f.require_same_lattice(g, "convolve_product");
  const Lattice& lat = f.lattice();
  const double norm = 1.0 / torus_volume(lat.dim());
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g[j] != cplx{0.0, 0.0}) support.push_back(j);
  }
  SpectralField out(lat, f.is_real() && g.is_real() ? Reality::real : Reality::complex);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Mode k = lat.mode(i);
    cplx acc{0.0, 0.0};
    for (const std::size_t j : support) {
      const Mode kj = k - lat.mode(j);
      if (!lat.contains(kj)) continue;
      acc += f[lat.index(kj)] * g[j];
    }
    out[i] = norm * acc;
  }
  return out;
}

namespace detail {

// Grid of N = 2K + 1 points per axis; mode k sits at index k mod N.
inline std::size_t grid_index(const Lattice& lat, Mode k) {
  const int n = static_cast<int>(lat.side());
  const auto wrap = [n](int v) { return static_cast<std::size_t>(((v % n) + n) % n); };
  if (lat.dim() == 1) return wrap(k.k1);
  return wrap(k.k1) * static_cast<std::size_t>(n) + wrap(k.k2);
}

// Physical values f(x_n) = (2 pi)^{-d} sum_k f^(k) e^{i k x_n}, x_n = 2 pi n / N.
inline std::vector<cplx> to_grid(const SpectralField& f, const PeriodicFft& fft) {
  const Lattice& lat = f.lattice();
  std::vector<cplx> grid(fft.size(), cplx{0.0, 0.0});
  const double norm = 1.0 / torus_volume(lat.dim());
  for (std::size_t i = 0; i < f.size(); ++i) grid[grid_index(lat, lat.mode(i))] = norm * f[i];
  fft.backward(grid);
  return grid;
}

// Trapezoidal Fourier coefficients (2 pi / N)^d sum_n u_n e^{-i k x_n}.
inline SpectralField from_grid(std::vector<cplx> grid, const Lattice& lat, const PeriodicFft& fft,
                               Reality reality) {
  fft.forward(grid);
  const double cell = two_pi / static_cast<double>(fft.points());
  const double weight = lat.dim() == 1 ? cell : cell * cell;
  SpectralField out(lat, reality);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = weight * grid[grid_index(lat, lat.mode(i))];
  }
  return out;
}

}  // namespace detail

/// Transform-based product: inputs are 2/3-dealiased, multiplied pointwise on
/// the (2K+1)^d grid, and the result is dealiased again. Agrees with
/// dealias(convolve_product(dealias(f), dealias(g))) to rounding.
inline SpectralField convolve_product_fast(const SpectralField& f, const SpectralField& g) {
  f.require_same_lattice(g, "convolve_product_fast");
  const Lattice& lat = f.lattice();
  const PeriodicFft fft(lat.dim(), static_cast<int>(lat.side()));
  auto u = detail::to_grid(dealias(f), fft);
  const auto v = detail::to_grid(dealias(g), fft);
  for (std::size_t n = 0; n < u.size(); ++n) u[n] *= v[n];
  const Reality reality = f.is_real() && g.is_real() ? Reality::real : Reality::complex;
  SpectralField out = dealias(detail::from_grid(std::move(u), lat, fft, Reality::complex));
  if (reality == Reality::real) out.symmetrize();
  return out;
}

}  // namespace gevrey_flow
