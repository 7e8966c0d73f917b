#pragma once

#include <cstdint>

namespace pbesov {

/// A value of the Riemann zeta function (or one of its tails) together with a
/// rigorous bound on the absolute error.
struct ZetaValue {
  double value = 0.0;
  double error_bound = 0.0;
  std::int64_t terms = 0;  ///< number of explicitly summed terms
};

/// ζ(θ) = Σ_{n≥1} n^{-θ} with |result - ζ(θ)| <= tol guaranteed.
///
/// Explicit partial sum up to N, plus the tail integral ∫_{N+1/2}^∞ x^{-θ}dx.
/// Convexity of x^{-θ} bounds the tail error by
/// (θ(θ+1)(N+½)^{-θ-2} + θ(N+½)^{-θ-1}) / 24; N is the smallest count for
/// which this bound plus summation round-off stays below tol.
///
/// Throws DomainError for θ <= 1 and for tol below what double precision can
/// certify (about 1e-15 relative).
ZetaValue zeta(double theta, double tol = 1e-12);

/// Σ_{n≥m} n^{-s} for m >= 1 and s > 1, with the same certificate as zeta().
ZetaValue zeta_tail(double s, std::int64_t m, double tol = 1e-12);

}  // namespace pbesov
