#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "pbesov/radial.hpp"

using namespace pbesov;

namespace {

const double pi = boost::math::constants::pi<double>();

RadialFieldSpec field(double sigma, double theta, double p, int d, long n_cap = 64) {
  return make_radial_field(BumpParams(sigma, theta, n_cap), p, d);
}

}  // namespace

TEST_CASE("sphere areas") {
  CHECK(sphere_area(1) == doctest::Approx(2.0));
  CHECK(sphere_area(2) == doctest::Approx(2 * pi));
  CHECK(sphere_area(3) == doctest::Approx(4 * pi));
  CHECK_THROWS_AS(sphere_area(0), DomainError);
}

TEST_CASE("field construction rejects p < 2 and d < 1") {
  const BumpParams b(0.5, 2.0, 64);
  CHECK_THROWS_AS(make_radial_field(b, 1.5, 2), DomainError);
  CHECK_THROWS_AS(make_radial_field(b, 3.0, 0), DomainError);
  const RadialFieldSpec s = make_radial_field(b, 3.0, 2);
  CHECK(s.dual_bump.sigma() == doctest::Approx(1.0));
  CHECK(s.dual_bump.theta() == 2.0);
}

TEST_CASE("lifted values and supports") {
  const RadialFieldSpec s = field(0.5, 2.0, 3.0, 2, 100'000);
  CHECK(eval_u_d(Eigen::Vector2d(0, 0), s) == 0.0);
  CHECK(eval_u_d(Eigen::Vector2d(0.9, 0), s) == 0.0);
  CHECK(eval_u_d(Eigen::Vector2d(0.3, 0.4), s) == doctest::Approx(eval_u(0.5, s.bump)));
  CHECK(eval_grad_u_d(Eigen::Vector2d(0.1, 0), s).norm() == 0.0);
  CHECK(eval_A(Eigen::Vector2d(0.0, 0.2), s).norm() == 0.0);
  CHECK(eval_f_strong(0.1, s) == 0.0);
  // v at the pull-back of the block-2 plateau point 4.375
  const double z = s.bump.zeta_theta().value;
  const double r_star = (4.375 + 4 * z) / (16 * z);
  CHECK(eval_v(r_star, s.bump) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("A(grad u) equals |grad u|^{p-2} grad u") {
  for (double p : {2.0, 2.5, 3.0, 4.0}) {
    const RadialFieldSpec s = field(0.35, 1.8, p, 3, 10'000);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> c(-0.8, 0.8);
    for (int i = 0; i < 500; ++i) {
      const Eigen::Vector3d x(c(rng), c(rng), c(rng));
      const Eigen::Vector3d g = eval_grad_u_d(x, s);
      const Eigen::Vector3d expected = std::pow(g.norm(), p - 2) * g;
      CHECK((eval_A(x, s) - expected).norm() <= 1e-12 * (1 + expected.norm()));
    }
  }
}

TEST_CASE("strong form in one dimension is -v'") {
  const RadialFieldSpec s = field(0.6, 2.0, 2.0, 1);
  for (double r : {0.27, 0.31, 0.43, 0.6, 0.7}) {
    try {
      CHECK(eval_f_strong(r, s) == doctest::Approx(-eval_v_prime(r, s.dual_bump)));
    } catch (const NotDifferentiable&) {
    }
  }
}

TEST_CASE("radial L_rho norm of an annulus indicator") {
  const double area = radial_lp_norm([](double) { return 1.0; }, 1.0, 2);
  CHECK(area == doctest::Approx(pi / 2).epsilon(1e-12));
  CHECK(radial_lp_norm([](double) { return 2.0; }, INFINITY, 3) == doctest::Approx(2.0));
  const double l2 = radial_lp_norm([](double r) { return r; }, 2.0, 1);
  CHECK(l2 == doctest::Approx(std::sqrt(2 * (0.421875 - 0.015625) / 3)).epsilon(1e-12));
}

TEST_CASE("radial L2 norm of v matches a polar tanh-sinh reference") {
  const BumpParams b(0.5, 2.0, 60);
  const auto cuts = radial_breakpoints(b, 60);
  const double norm = radial_lp_norm([&](double r) { return eval_v(r, b); }, 2.0, 2, cuts);
  std::vector<double> edges{0.25, 0.75};
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  std::sort(edges.begin(), edges.end());
  boost::math::quadrature::tanh_sinh<double> ts(10);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i + 1] > edges[i])) continue;
    total += ts.integrate([&](double r) { return r * std::pow(eval_v(r, b), 2); }, edges[i],
                          edges[i + 1], 1e-12);
  }
  CHECK(norm == doctest::Approx(std::sqrt(2 * pi * total)).epsilon(1e-6));
}

TEST_CASE("test functions: gradients agree with finite differences") {
  for (const auto& psi : test_function_suite<2>()) {
    CAPTURE(psi.name);
    CHECK(psi.support_radius <= 1.0);
    const Eigen::Vector2d x(0.31, -0.22);
    const Eigen::Vector2d g = psi.gradient(x);
    for (int k = 0; k < 2; ++k) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e[k] = 1e-6;
      const double fd = (psi.value(x + e) - psi.value(x - e)) / 2e-6;
      CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6).scale(1e-8));
    }
    CHECK(psi.value(Eigen::Vector2d(0.99, 0.2)) == 0.0);
    CHECK(w1_inf_norm(psi) > 0.0);
  }
}

TEST_CASE("f_weak vanishes for a test function that is constant on the annulus") {
  const RadialFieldSpec s = field(0.6, 2.0, 2.0, 2);
  const QuadratureGrid grid(s.bump, 2);
  const auto psi = plateau_test_function<2>(0.8, 0.95);
  CHECK(std::abs(f_weak(psi, s, grid)) <= 1e-14);
}

TEST_CASE("weak form on the grid matches the independent oracle") {
  for (int p : {2, 3}) {
    {
      const RadialFieldSpec s = field(0.6, 2.0, p, 1);
      const QuadratureGrid grid(s.bump, 1);
      for (const auto& psi : test_function_suite<1>()) {
        const double tol = 1e-8 * (1 + w1_inf_norm(psi));
        CHECK(std::abs(f_weak(psi, s, grid) - weak_form_oracle(psi, s)) <= tol);
      }
    }
    {
      const RadialFieldSpec s = field(0.6, 2.0, p, 2);
      const QuadratureGrid grid(s.bump, 2);
      for (const auto& psi : test_function_suite<2>()) {
        CAPTURE(psi.name);
        const double tol = 1e-8 * (1 + w1_inf_norm(psi));
        CHECK(std::abs(f_weak(psi, s, grid) - weak_form_oracle(psi, s)) <= tol);
      }
    }
  }
}

TEST_CASE("integration by parts: strong and weak forms agree") {
  const RadialFieldSpec s = field(0.6, 2.0, 2.0, 2);
  const QuadratureGrid grid(s.bump, 2);
  for (const auto& psi : test_function_suite<2>()) {
    CAPTURE(psi.name);
    const double weak = f_weak(psi, s, grid);
    const double strong = f_strong_integral(psi, s, grid);
    CHECK(std::abs(weak - strong) <= 1e-6 * std::max(1.0, std::abs(weak)));
  }
}

TEST_CASE("grid layout") {
  const BumpParams b(0.5, 2.0, 1000);
  const QuadratureGrid grid(b, 2);
  CHECK(grid.has_tail());
  CHECK(grid.refined().radial().size() > grid.radial().size());
  for (const auto& node : grid.radial()) {
    CHECK(node.r >= 0.25);
    CHECK(node.r <= 0.75);
  }
  double angular = 0.0;
  for (const auto& a : grid.angular()) angular += a.weight;
  CHECK(angular == doctest::Approx(2 * pi));
  CHECK_THROWS_AS(QuadratureGrid(b, 4), PreconditionViolation);
}
