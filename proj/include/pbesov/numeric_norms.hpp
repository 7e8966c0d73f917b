#pragma once

// Quadrature oracles for ‖w‖_{L_ρ} and ‖w'‖_{L_ρ}. Blocks 2..K are integrated
// piece by piece with adaptive tanh-sinh in block-local coordinates; blocks
// beyond K are added by self-similarity (block n is block K rescaled by
// (n/K)^{-θ}), with the power sum taken from Boost's ζ.

#include <optional>
#include <string>

#include "pbesov/bump.hpp"

namespace pbesov {

struct QuadratureNorm {
  double value = 0.0;
  double error_estimate = 0.0;  ///< summed panel estimates, in the norm's units
  long blocks = 0;              ///< blocks integrated explicitly
};

/// ‖w‖_{L_ρ} by quadrature, 0 < ρ < ∞.
QuadratureNorm w_lp_norm_quadrature(double rho, const BumpParams& params, long blocks = 64);

/// ‖w'‖_{L_ρ} by quadrature, 0 < ρ < ∞. Only meaningful when the closed form
/// is finite; the tail sum is infinite otherwise and nullopt is returned.
std::optional<QuadratureNorm> w_prime_lp_norm_quadrature(double rho, const BumpParams& params,
                                                         long blocks = 64);

/// One row of the closed-form-vs-oracle table.
struct NormCheck {
  std::string quantity;  ///< "w" or "w'"
  double sigma = 0.0;
  double theta = 0.0;
  double rho = 0.0;
  std::optional<double> closed_form;
  std::optional<double> oracle;
  double relative_difference = 0.0;  ///< 0 when both diverge
  bool agree = false;
};

/// ρ = ∞ compares against the sampled sup of the evaluators instead.
NormCheck check_w_norm(double rho, const BumpParams& params, double tolerance = 1e-8);
NormCheck check_w_prime_norm(double rho, const BumpParams& params, double tolerance = 1e-8);

}  // namespace pbesov
