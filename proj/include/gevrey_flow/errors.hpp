#pragma once

#include <stdexcept>
#include <string>

namespace gevrey_flow {

// Fields living on different lattices were combined.
struct lattice_mismatch : std::invalid_argument {
  explicit lattice_mismatch(const std::string& what)
      : std::invalid_argument("lattice mismatch: " + what) {}
};

// An exponential weight would leave the double-precision range.
struct overflow_risk : std::range_error {
  explicit overflow_risk(const std::string& what)
      : std::range_error("overflow risk: " + what) {}
};

// |0|^{negative} applied to a nonzero zero mode.
struct zero_mode_singularity : std::domain_error {
  explicit zero_mode_singularity(const std::string& what)
      : std::domain_error("zero-mode singularity: " + what) {}
};

// The lattice tail of an infimum/supremum cannot be bounded.
struct tail_not_controllable : std::domain_error {
  explicit tail_not_controllable(const std::string& what)
      : std::domain_error("tail not controllable: " + what) {}
};

// NaN/inf coefficients or broken Hermitian symmetry.
struct invalid_field : std::invalid_argument {
  explicit invalid_field(const std::string& what)
      : std::invalid_argument("invalid field: " + what) {}
};

}  // namespace gevrey_flow
