#include "pbesov/zeta.hpp"

#include <cmath>
#include <limits>

#include "pbesov/errors.hpp"

namespace pbesov {
namespace {

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;
constexpr std::int64_t kMaxTerms = 2'000'000'000;

// Upper bound on (∫_{N+1/2}^∞ x^{-s} dx) - Σ_{n>N} n^{-s} (midpoint rule on a
// convex, decreasing integrand with decreasing second derivative).
double midpoint_defect_bound(double s, double half_point) {
  return (s * (s + 1) * std::pow(half_point, -s - 2) +
          s * std::pow(half_point, -s - 1)) /
         24.0;
}

}  // namespace

ZetaValue zeta_tail(double s, std::int64_t m, double tol) {
  if (!(s > 1.0)) throw DomainError("zeta: series diverges for argument <= 1");
  if (m < 1) throw PreconditionViolation("zeta_tail: start index must be >= 1");
  if (!(tol > 0.0)) throw PreconditionViolation("zeta: tolerance must be > 0");

  const double md = static_cast<double>(m);
  const double magnitude = std::pow(md, -s) + std::pow(md, 1 - s) / (s - 1);
  const double roundoff = 4 * kUnitRoundoff * magnitude;
  if (tol <= 2 * roundoff) {
    throw DomainError("zeta: tolerance below double-precision resolution");
  }
  const double budget = 2 * (tol - roundoff);

  // Smallest N >= m-1 with defect bound <= budget.
  double guess = std::pow(s / (12.0 * budget), 1.0 / (s + 1)) - 0.5;
  std::int64_t last = std::max<std::int64_t>(m - 1, static_cast<std::int64_t>(guess));
  while (last > m - 1 && midpoint_defect_bound(s, static_cast<double>(last) - 0.5) <= budget) {
    --last;
  }
  while (midpoint_defect_bound(s, static_cast<double>(last) + 0.5) > budget) {
    ++last;
    if (last - m > kMaxTerms) throw DomainError("zeta: tolerance not reachable");
  }

  // Neumaier-compensated sum, smallest terms first.
  double sum = 0.0;
  double comp = 0.0;
  for (std::int64_t n = last; n >= m; --n) {
    const double term = std::pow(static_cast<double>(n), -s);
    const double t = sum + term;
    comp += std::abs(sum) >= term ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  const double half_point = static_cast<double>(last) + 0.5;
  const double defect = midpoint_defect_bound(s, half_point);
  const double integral = std::pow(half_point, 1 - s) / (s - 1);

  ZetaValue out;
  out.value = (sum + comp) + (integral - defect / 2);
  out.error_bound = defect / 2 + 4 * kUnitRoundoff * out.value;
  out.terms = last - m + 1;
  return out;
}

ZetaValue zeta(double theta, double tol) { return zeta_tail(theta, 1, tol); }

}  // namespace pbesov
