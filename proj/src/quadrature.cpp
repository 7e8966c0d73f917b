#include "pbesov/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

#include "pbesov/errors.hpp"

namespace pbesov {
namespace {

GaussRule golub_welsch(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = 2.0 * solver.eigenvectors().row(0).array().square().transpose();
  // symmetrize to remove eigen-solver noise
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const DoubleExponentialRule& double_exponential_rule() {
  static const DoubleExponentialRule rule = [] {
    constexpr double step = 0.125;
    constexpr int half_count = 28;  // t in [-3.5, 3.5]
    const double half_pi = std::acos(0.0);
    DoubleExponentialRule r;
    for (int k = -half_count; k <= half_count; ++k) {
      const double t = k * step;
      const double u = half_pi * std::sinh(t);
      // 1 ± tanh(u) without cancellation, halved to unit length
      const double e = std::exp(-2 * std::abs(u));
      const double small = e / (1 + e);
      const double large = 1 / (1 + e);
      const double ch = std::cosh(u);
      const double w = half_pi * std::cosh(t) / (ch * ch) / 2;
      r.left.push_back(u < 0 ? small : large);
      r.right.push_back(u < 0 ? large : small);
      r.weight.push_back(step * w);
      r.weight_half.push_back(k % 2 == 0 ? 2 * step * w : 0.0);
    }
    return r;
  }();
  return rule;
}

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 512) throw PreconditionViolation("gauss_legendre: need 1 <= n <= 512");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(golub_welsch(n));
  return *slot;
}

}  // namespace pbesov
