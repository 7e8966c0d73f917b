#pragma once

// Radial lift of the window profiles to ℝ^d: u(x) = u_{σ,θ}(|x|),
// ∇u = v_{σ,θ}(|x|) x/|x|, the field A(∇u) = |∇u|^{p-2}∇u (which is the
// gradient of the lift with exponent (p-1)σ), and the right-hand side f.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pbesov/bump.hpp"
#include "pbesov/errors.hpp"
#include "pbesov/quadrature.hpp"

namespace pbesov {

struct RadialFieldSpec {
  BumpParams bump;
  double p;
  int d;
  BumpParams dual_bump;  ///< exponent (p-1)σ, same θ and block table
};

/// Throws DomainError unless p >= 2 and d >= 1.
RadialFieldSpec make_radial_field(const BumpParams& bump, double p, int d);

template <class Derived>
double eval_u_d(const Eigen::MatrixBase<Derived>& x, const RadialFieldSpec& spec) {
  return eval_u(x.norm(), spec.bump);
}

/// v(|x|) x/|x|; the zero vector at x = 0.
template <class Derived>
Eigen::Matrix<double, Derived::RowsAtCompileTime, 1> radial_gradient(
    const Eigen::MatrixBase<Derived>& x, const BumpParams& bump) {
  using Vec = Eigen::Matrix<double, Derived::RowsAtCompileTime, 1>;
  const double r = x.norm();
  if (r == 0.0) return Vec::Zero(x.rows());
  return (eval_v(r, bump) / r) * x;
}

template <class Derived>
Eigen::Matrix<double, Derived::RowsAtCompileTime, 1> eval_grad_u_d(
    const Eigen::MatrixBase<Derived>& x, const RadialFieldSpec& spec) {
  return radial_gradient(x, spec.bump);
}

/// v_{(p-1)σ,θ}(|x|) x/|x|.
template <class Derived>
Eigen::Matrix<double, Derived::RowsAtCompileTime, 1> eval_A(
    const Eigen::MatrixBase<Derived>& x, const RadialFieldSpec& spec) {
  return radial_gradient(x, spec.dual_bump);
}

/// -v'_{(p-1)σ}(r) - v_{(p-1)σ}(r)(d-1)/r. Throws NotDifferentiable at
/// pull-backs of transition points.
double eval_f_strong(double r, const RadialFieldSpec& spec);

/// |S^{d-1}| = 2π^{d/2}/Γ(d/2).
double sphere_area(int d);

/// Smooth test function with analytic gradient, supported in B_R(0).
template <int Dim>
struct TestFunction {
  using Vec = Eigen::Matrix<double, Dim, 1>;
  std::string name;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  double support_radius = 1.0;
};

/// exp(-1/(1-|x/R|²)) x^α for |x| < R.
template <int Dim>
TestFunction<Dim> bump_test_function(double radius, const Eigen::Matrix<int, Dim, 1>& alpha);

/// Equal to 1 on B_{inner}(0), 0 outside B_{outer}(0), smooth in between.
template <int Dim>
TestFunction<Dim> plateau_test_function(double inner = 0.8, double outer = 0.95);

/// The standard suite: five functions mixing R ∈ {0.85, 1} with the monomials
/// 1, x_1², x_2² (x_1² when d = 1) and x_1³, followed by the plateau function.
template <int Dim>
std::vector<TestFunction<Dim>> test_function_suite();

/// sup|ψ| + sup|∇ψ| over a polar sample of B_R(0).
template <int Dim>
double w1_inf_norm(const TestFunction<Dim>& psi, int samples = 200);

/// One radial quadrature node. Ramp nodes carry their distance to both panel
/// ends so profile values are formed without cancellation.
struct RadialNode {
  double r = 0.0;
  double weight = 0.0;
  long block = 0;      ///< 0 for tail-panel nodes
  int lobe = 0;        ///< +1 or -1 for block nodes
  Phase phase = Phase::Gap;
  double dist_left = 0.0;
  double dist_right = 0.0;
};

struct AngularNode {
  Eigen::Vector3d direction;  ///< first d entries used
  double weight = 0.0;
};

struct QuadratureOptions {
  long n_split = 64;        ///< blocks resolved panel by panel
  int plateau_order = 12;   ///< Gauss-Legendre points on plateau panels
  int tail_panels = 512;    ///< composite panels on each tail window
  int tail_order = 8;
  int angular_order = 24;   ///< Gauss points per angular variable
  int ramp_pieces = 1;      ///< double-exponential sub-panels per ramp
};

/// Tensor grid on the annulus 1/4 <= |x| <= 3/4 for d <= 3. Radial panels are
/// the ramp and plateau pieces of both lobes for blocks n <= n_split (gaps
/// carry no field); blocks beyond share one composite tail panel per lobe.
class QuadratureGrid {
 public:
  QuadratureGrid(const BumpParams& bump, int d, QuadratureOptions options = {});

  int dimension() const noexcept { return d_; }
  const std::vector<RadialNode>& radial() const noexcept { return radial_; }
  const std::vector<AngularNode>& angular() const noexcept { return angular_; }
  bool has_tail() const noexcept { return has_tail_; }
  const QuadratureOptions& options() const noexcept { return options_; }
  /// Polynomial degree integrated exactly on plateau panels and per angle.
  int exact_degree() const noexcept { return 2 * options_.plateau_order - 1; }
  /// Same layout with every resolution roughly doubled.
  QuadratureGrid refined() const;

  /// v_{σ,θ} and v'_{σ,θ} at a node, for any σ sharing this grid's θ.
  std::pair<double, double> profile(const RadialNode& node, const BumpParams& bump) const;

 private:
  BumpParams bump_;
  int d_;
  QuadratureOptions options_;
  std::vector<RadialNode> radial_;
  std::vector<AngularNode> angular_;
  bool has_tail_ = false;
};

/// Σ over the grid of r^{d-1} g(r, ω) for a callable g(node, direction).
template <class G>
double integrate_on_grid(const QuadratureGrid& grid, G&& g) {
  const int d = grid.dimension();
  double total = 0.0;
  for (const auto& node : grid.radial()) {
    const double jac = std::pow(node.r, d - 1) * node.weight;
    double shell = 0.0;
    for (const auto& ang : grid.angular()) shell += ang.weight * g(node, ang.direction);
    total += jac * shell;
  }
  return total;
}

struct WeakFormOptions {
  double tolerance = 1e-10;  ///< two-resolution agreement, relative to 1 + |value|
};

/// ∫ v_{(p-1)σ}(|x|)⟨x/|x|, ∇ψ(x)⟩ dx on `grid`, confirmed on grid.refined().
/// Throws GridTooCoarse when the two differ by more than the tolerance.
template <int Dim>
double f_weak(const TestFunction<Dim>& psi, const RadialFieldSpec& spec,
              const QuadratureGrid& grid, const WeakFormOptions& options = {});

/// ∫ f(|x|) ψ(x) dx with the strong-form f, on the same kind of grid.
template <int Dim>
double f_strong_integral(const TestFunction<Dim>& psi, const RadialFieldSpec& spec,
                         const QuadratureGrid& grid);

/// Independent evaluation of ∫⟨A(∇u), ∇ψ⟩: the field is formed as
/// |v_σ|^{p-2}v_σ from the primal profile, r is integrated by adaptive
/// tanh-sinh between radial breakpoints and φ by the trapezoidal rule
/// (spectrally accurate for the periodic, analytic angular integrand).
template <int Dim>
double weak_form_oracle(const TestFunction<Dim>& psi, const RadialFieldSpec& spec,
                        int angular_points = 24);

/// [ |S^{d-1}| ∫_{1/4}^{3/4} |g(r)|^ρ r^{d-1} dr ]^{1/ρ}; ess sup |g| for ρ = ∞.
/// Panels are split at `breakpoints` (any subset of (1/4, 3/4)).
double radial_lp_norm(const std::function<double(double)>& g, double rho, int d,
                      const std::vector<double>& breakpoints = {});

/// Pull-backs to r of the transition points of blocks n <= n_max on both
/// lobes, plus the lobe ends.
std::vector<double> radial_breakpoints(const BumpParams& bump, long n_max);

}  // namespace pbesov
