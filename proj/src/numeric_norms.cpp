#include "pbesov/numeric_norms.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <algorithm>
#include <cmath>

#include "pbesov/errors.hpp"

namespace pbesov {
namespace {

struct BlockIntegral {
  double value = 0.0;
  double error = 0.0;
};

// ∫ over block n of |g|^ρ, where g is w (derivative = false) or w'.
BlockIntegral integrate_block(long n, double rho, double sigma, double theta, bool derivative) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  const double c = std::pow(static_cast<double>(n), -theta);
  // ramp in local distance t from the foot; both ramps integrate alike
  auto ramp = [&](double t) {
    if (!(t > 0)) return 0.0;
    const double g = derivative ? sigma * std::pow(t, sigma - 1) : std::pow(t, sigma);
    return std::pow(g, rho);
  };
  BlockIntegral out;
  double err = 0.0;
  const double up = integrator.integrate(ramp, 0.0, c, 1e-13, &err);
  out.value += 2 * up;
  out.error += 2 * err * 0.5 * c;  // estimate is for the unit-scaled integral
  if (!derivative) {
    out.value += c * std::pow(std::pow(c, sigma), rho);
  }
  return out;
}

std::optional<QuadratureNorm> lp_by_blocks(double rho, const BumpParams& params, long blocks,
                                          bool derivative) {
  if (!(rho > 0) || std::isinf(rho)) {
    throw PreconditionViolation("norm quadrature: need 0 < rho < inf");
  }
  if (blocks < 2) throw PreconditionViolation("norm quadrature: need at least 2 blocks");
  const double sigma = params.sigma();
  const double theta = params.theta();
  const double s = derivative ? theta * (1 + (sigma - 1) * rho) : theta * (sigma * rho + 1);
  if (derivative && sigma < 1 && !(1 + (sigma - 1) * rho > 0)) return std::nullopt;
  if (!(s > 1)) return std::nullopt;

  double total = 0.0;
  double error = 0.0;
  BlockIntegral last;
  for (long n = 2; n <= blocks; ++n) {
    last = integrate_block(n, rho, sigma, theta, derivative);
    total += last.value;
    error += last.error;
  }
  // Σ_{n>K} n^{-s} = ζ(s) - Σ_{n<=K} n^{-s}
  double head = 0.0;
  for (long n = blocks; n >= 1; --n) head += std::pow(static_cast<double>(n), -s);
  const double tail_sum = boost::math::zeta(s) - head;
  const double scale = std::pow(static_cast<double>(blocks), s);
  total += tail_sum * scale * last.value;
  error += tail_sum * scale * last.error;

  QuadratureNorm out;
  out.value = std::pow(total, 1 / rho);
  out.error_estimate = out.value * error / (rho * total);
  out.blocks = blocks;
  return out;
}

// Sup of |w| or |w'| from the evaluators over blocks 2..K. Each ramp is sampled
// on a grid refined geometrically towards both ends; w' is unbounded for σ < 1,
// detected as growth between offsets 1e-5 c and 1e-10 c from the foot.
std::optional<QuadratureNorm> sup_by_sampling(const BumpParams& params, long blocks,
                                              bool derivative) {
  if (blocks < 2) throw PreconditionViolation("norm quadrature: need at least 2 blocks");
  auto g = [&](double xi) {
    return derivative ? std::abs(eval_w_prime(xi, params)) : std::abs(eval_w(xi, params));
  };
  double best = 0.0;
  for (long n = 2; n <= blocks && n < params.n_cap(); ++n) {
    const double a = breakpoint(n, params);
    const double c = std::pow(static_cast<double>(n), -params.theta());
    const double guard = 1e-12 * a;  // stay clear of the evaluator's breakpoint snap
    if (derivative) {
      const double near = g(a + std::max(1e-10 * c, guard));
      if (near > (1 + 1e-9) * g(a + 1e-5 * c)) return std::nullopt;
      best = std::max(best, near);
    }
    for (int k = 1; k < 256; ++k) best = std::max(best, g(a + c * k / 256.0));
    for (int e = 1; e <= 10; ++e) {
      best = std::max(best, g(a + c - std::max(c * std::pow(10.0, -e), guard)));
    }
    if (!derivative) best = std::max(best, g(a + 1.5 * c));
  }
  QuadratureNorm out;
  out.value = best;
  out.blocks = blocks;
  return out;
}

NormCheck compare(const char* quantity, double rho, const BumpParams& params,
                  std::optional<double> closed, std::optional<QuadratureNorm> oracle,
                  double tolerance) {
  NormCheck row;
  row.quantity = quantity;
  row.sigma = params.sigma();
  row.theta = params.theta();
  row.rho = rho;
  row.closed_form = closed;
  if (oracle) row.oracle = oracle->value;
  if (closed && oracle) {
    row.relative_difference = std::abs(*closed - oracle->value) / std::abs(oracle->value);
    row.agree = row.relative_difference <= tolerance;
  } else {
    row.agree = !closed && !oracle;
  }
  return row;
}

}  // namespace

QuadratureNorm w_lp_norm_quadrature(double rho, const BumpParams& params, long blocks) {
  return *lp_by_blocks(rho, params, blocks, false);
}

std::optional<QuadratureNorm> w_prime_lp_norm_quadrature(double rho, const BumpParams& params,
                                                         long blocks) {
  return lp_by_blocks(rho, params, blocks, true);
}

NormCheck check_w_norm(double rho, const BumpParams& params, double tolerance) {
  if (std::isinf(rho)) {
    return compare("w", rho, params, w_lp_norm(rho, params), sup_by_sampling(params, 64, false),
                   tolerance);
  }
  return compare("w", rho, params, w_lp_norm(rho, params),
                 w_lp_norm_quadrature(rho, params), tolerance);
}

NormCheck check_w_prime_norm(double rho, const BumpParams& params, double tolerance) {
  if (std::isinf(rho)) {
    return compare("w'", rho, params, w_prime_lp_norm(rho, params),
                   sup_by_sampling(params, 64, true), tolerance);
  }
  return compare("w'", rho, params, w_prime_lp_norm(rho, params),
                 w_prime_lp_norm_quadrature(rho, params), tolerance);
}

}  // namespace pbesov
