#pragma once

// Panel quadrature rules: Gauss-Legendre (Golub-Welsch), a graded variant for
// endpoint singularities, and a tanh-sinh wrapper that hands the integrand
// the distance to both panel ends.

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace pbesov {

struct GaussRule {
  Eigen::VectorXd nodes;    ///< on [-1, 1], ascending
  Eigen::VectorXd weights;
};

/// n-point Gauss-Legendre rule; cached, safe to call concurrently.
const GaussRule& gauss_legendre(int n);

template <class F>
double gauss_panel(F&& f, double a, double b, int n) {
  const GaussRule& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

/// ∫_a^b f with x = a + (b-a) s^q (graded toward a) or the mirror image
/// (graded toward b), Gauss-Legendre in s. f receives (x, distance to the
/// graded end).
template <class F>
double graded_gauss_panel(F&& f, double a, double b, int n, double q, bool toward_left) {
  const GaussRule& rule = gauss_legendre(n);
  const double len = b - a;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * (rule.nodes[i] + 1.0);
    const double dist = len * std::pow(s, q);
    const double jac = len * q * std::pow(s, q - 1);
    const double x = toward_left ? a + dist : b - dist;
    sum += 0.5 * rule.weights[i] * jac * f(x, dist);
  }
  return sum;
}

struct PanelResult {
  double value = 0.0;
  double error = 0.0;
};

/// Fixed tanh-sinh rule on the unit panel: node i sits at relative distance
/// left[i] from the left end and right[i] from the right end. Odd-indexed
/// nodes are dropped by the half-resolution rule.
struct DoubleExponentialRule {
  std::vector<double> left;
  std::vector<double> right;
  std::vector<double> weight;       ///< step h
  std::vector<double> weight_half;  ///< step 2h on even nodes, 0 elsewhere
};

const DoubleExponentialRule& double_exponential_rule();

/// ∫_a^b f by the fixed rule. f receives (x, dist_left, dist_right).
/// `error` is |I_h - I_{2h}|²/|I_h|: the step-2h error squared, since halving
/// the step roughly doubles the number of correct digits.
template <class F>
PanelResult de_panel(F&& f, double a, double b) {
  const DoubleExponentialRule& rule = double_exponential_rule();
  const double len = b - a;
  double fine = 0.0;
  double coarse = 0.0;
  for (std::size_t i = 0; i < rule.weight.size(); ++i) {
    const double dl = len * rule.left[i];
    const double dr = len * rule.right[i];
    const double fx = f(dl <= dr ? a + dl : b - dr, dl, dr);
    fine += rule.weight[i] * fx;
    coarse += rule.weight_half[i] * fx;
  }
  const double diff = std::abs(fine - coarse);
  const double roundoff = 1e-15 * std::abs(fine);
  const double err = std::max(roundoff, std::min(diff, diff * diff / std::abs(fine)));
  return PanelResult{len * fine, len * err};
}

/// The fixed rule evaluated coarse-to-fine: steps 1/2, 1/4 and 1/8, each
/// level reusing the nodes of the previous one. A level is kept once its error
/// estimate (squared difference to the next coarser step, over |I|) is below
/// max(rel_tol·|I|, abs_budget); the step-1/8 result is returned otherwise.
template <class F>
PanelResult de_panel_tiered(F&& f, double a, double b, double rel_tol, double abs_budget) {
  const DoubleExponentialRule& rule = double_exponential_rule();
  const double len = b - a;
  const int count = static_cast<int>(rule.weight.size());
  const int mid = count / 2;
  std::array<double, 64> values{};  // the rule has 57 nodes
  auto eval = [&](int i) {
    const double dl = len * rule.left[i];
    const double dr = len * rule.right[i];
    values[i] = f(dl <= dr ? a + dl : b - dr, dl, dr);
  };
  // sum over nodes with index offset divisible by `stride`, at step stride/8
  auto level_sum = [&](int stride) {
    double sum = 0.0;
    for (int i = mid % stride; i < count; i += stride) sum += stride * rule.weight[i] * values[i];
    return sum;
  };
  for (int i = mid % 4; i < count; i += 4) eval(i);
  double coarse = level_sum(8);
  double fine = level_sum(4);
  for (int stride : {2, 1}) {
    const double diff = std::abs(fine - coarse);
    const double err = std::max(1e-15 * std::abs(fine), std::min(diff, diff * diff / std::abs(fine)));
    if (len * err <= std::max(rel_tol * len * std::abs(fine), abs_budget)) {
      return PanelResult{len * fine, len * err};
    }
    for (int i = mid % stride; i < count; i += stride) {
      if ((i - mid) % (2 * stride) != 0) eval(i);
    }
    coarse = fine;
    fine = level_sum(stride);
  }
  const double diff = std::abs(fine - coarse);
  const double err = std::max(1e-15 * std::abs(fine), std::min(diff, diff * diff / std::abs(fine)));
  return PanelResult{len * fine, len * err};
}

/// Tanh-sinh on [a, b]. f receives (x, dist_left, dist_right), with the
/// distance to the nearer end computed without cancellation.
template <class F>
PanelResult tanh_sinh_panel(F&& f, double a, double b, double tol) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  PanelResult out;
  if (!(b > a)) return out;
  const double len = b - a;
  auto g = [&](double x, double xc) {
    double dl;
    double dr;
    if (xc < 0) {
      dl = -xc;
      dr = len - dl;
    } else {
      dr = xc;
      dl = len - dr;
    }
    return f(x, dl, dr);
  };
  out.value = integrator.integrate(g, a, b, tol, &out.error);
  out.error *= 0.5 * len;  // the reported estimate is for the unit-scaled integral
  return out;
}

}  // namespace pbesov
