#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gevrey_flow/errors.hpp"
#include "gevrey_flow/lattice.hpp"

namespace gevrey_flow {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// (2 pi)^d, the measure of the d-torus.
inline double torus_volume(int dim) { return dim == 1 ? two_pi : two_pi * two_pi; }

/// Whether a field is declared to represent a real function (Hermitian
/// coefficients) or an arbitrary complex one.
enum class Reality { real, complex };

/// Fourier coefficients f^(k) = \int_{T^d} f(x) e^{-ik.x} dx on a truncated
/// lattice. The inverse transform carries the (2 pi)^{-d} factor.
class SpectralField {
 public:
  static constexpr double hermitian_tolerance = 1e-12;

  explicit SpectralField(Lattice lattice, Reality reality = Reality::real)
      : lattice_(lattice), reality_(reality), coeffs_(lattice.size(), cplx{0.0, 0.0}) {}

  SpectralField(Lattice lattice, std::vector<cplx> coeffs, Reality reality = Reality::real)
      : lattice_(lattice), reality_(reality), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != lattice_.size()) {
      throw invalid_field("expected " + std::to_string(lattice_.size()) +
                          " coefficients, got " + std::to_string(coeffs_.size()));
    }
    validate();
  }

  /// The constant function f(x) = value, i.e. f^(0) = value (2 pi)^d.
  static SpectralField constant(Lattice lattice, double value) {
    SpectralField f(lattice);
    f.set({0, 0}, value * torus_volume(lattice.dim()));
    return f;
  }

  const Lattice& lattice() const { return lattice_; }
  Reality reality() const { return reality_; }
  bool is_real() const { return reality_ == Reality::real; }
  std::size_t size() const { return coeffs_.size(); }

  /// Coefficient at k; zero for modes outside the lattice (truncation).
  cplx coeff(Mode k) const {
    return lattice_.contains(k) ? coeffs_[lattice_.index(k)] : cplx{0.0, 0.0};
  }

  void set(Mode k, cplx value) {
    if (!lattice_.contains(k)) throw std::out_of_range("SpectralField::set: mode outside lattice");
    coeffs_[lattice_.index(k)] = value;
  }

  /// Sets f^(k) = value and f^(-k) = conj(value).
  void set_hermitian(Mode k, cplx value) {
    if (k.is_zero()) {
      set(k, cplx{value.real(), 0.0});
      return;
    }
    set(k, value);
    set(-k, std::conj(value));
  }

  std::span<const cplx> values() const { return coeffs_; }
  std::span<cplx> values() { return coeffs_; }
  cplx operator[](std::size_t i) const { return coeffs_[i]; }
  cplx& operator[](std::size_t i) { return coeffs_[i]; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  /// max_k |f^(-k) - conj f^(k)|, relative to max_k |f^(k)|.
  double hermitian_defect() const {
    const double scale = max_abs();
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      const Mode k = lattice_.mode(i);
      worst = std::max(worst, std::abs(coeffs_[lattice_.index(-k)] - std::conj(coeffs_[i])));
    }
    return worst / scale;
  }

  bool all_finite() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const cplx& c) {
      return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
  }

  void validate() const {
    if (!all_finite()) throw invalid_field("non-finite coefficient");
    if (is_real()) {
      const double defect = hermitian_defect();
      if (defect > hermitian_tolerance) {
        throw invalid_field("Hermitian symmetry violated (relative defect " +
                            std::to_string(defect) + ")");
      }
    }
  }

  /// Replaces the coefficients by their exact Hermitian part.
  void symmetrize() {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      const std::size_t j = lattice_.index(-lattice_.mode(i));
      if (j < i) continue;
      const cplx avg = 0.5 * (coeffs_[i] + std::conj(coeffs_[j]));
      coeffs_[i] = avg;
      coeffs_[j] = std::conj(avg);
    }
    reality_ = Reality::real;
  }

  void require_same_lattice(const SpectralField& other, const char* where) const {
    if (!(lattice_ == other.lattice_)) throw lattice_mismatch(where);
  }

  SpectralField& operator+=(const SpectralField& o) {
    require_same_lattice(o, "SpectralField::operator+=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    if (!o.is_real()) reality_ = Reality::complex;
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    require_same_lattice(o, "SpectralField::operator-=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    if (!o.is_real()) reality_ = Reality::complex;
    return *this;
  }
  SpectralField& operator*=(double a) {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }

  /// max_k |a^(k) - b^(k)|.
  friend double max_abs_diff(const SpectralField& a, const SpectralField& b) {
    a.require_same_lattice(b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      m = std::max(m, std::abs(a.coeffs_[i] - b.coeffs_[i]));
    }
    return m;
  }

 private:
  Lattice lattice_;
  Reality reality_;
  std::vector<cplx> coeffs_;
};

}  // namespace gevrey_flow
