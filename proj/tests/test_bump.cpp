#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "pbesov/bump.hpp"
#include "pbesov/errors.hpp"
#include "pbesov/numeric_norms.hpp"

using namespace pbesov;

namespace {

const BumpParams& half_two() {
  static const BumpParams params(0.5, 2.0, 100'000);
  return params;
}

double quad(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

}  // namespace

TEST_CASE("breakpoints are four times the partial sums") {
  const BumpParams& p = half_two();
  CHECK(breakpoint(2, p) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(breakpoint(3, p) == doctest::Approx(5.0).epsilon(1e-15));
  double sum = 0.0;
  for (long j = 1; j < 500; ++j) sum += std::pow(static_cast<double>(j), -2.0);
  CHECK(std::abs(breakpoint(500, p) - 4 * sum) <= 1e-12);
  CHECK(p.a_inf() == doctest::Approx(4 * boost::math::zeta(2.0)).epsilon(1e-13));
}

TEST_CASE("pointwise values of the bump train") {
  const BumpParams& p = half_two();
  CHECK(eval_w(4.125, p) == doctest::Approx(std::sqrt(0.125)).epsilon(1e-14));
  CHECK(eval_w(4.375, p) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(eval_w(4.6, p) == doctest::Approx(std::sqrt(0.15)).epsilon(1e-12));
  CHECK(eval_w(4.9, p) == 0.0);   // gap of block 2
  CHECK(eval_w(3.5, p) == 0.0);   // left of the support
  CHECK(eval_w(8.0, p) == 0.0);   // right of the support
  CHECK(eval_w(5.0 + 1.0 / 18, p) == doctest::Approx(std::sqrt(1.0 / 18)).epsilon(1e-13));
}

TEST_CASE("locate reports block, phase and offset") {
  const BumpParams& p = half_two();
  const SegmentLocator loc = locate(4.6, p);
  CHECK(loc.block_index == 2);
  CHECK(loc.phase == Phase::RampDown);
  CHECK(loc.local_offset == doctest::Approx(0.6).epsilon(1e-13));
  CHECK(locate(4.3, p).phase == Phase::Plateau);
  CHECK(locate(4.8, p).phase == Phase::Gap);
  CHECK(locate(1.0, p).phase == Phase::OutsideLeft);
}

TEST_CASE("the truncated tail is reported, not silently evaluated by locate") {
  const BumpParams p(0.5, 2.0, 50);
  const double inside_tail = 0.5 * (breakpoint(50, p) + p.a_inf());
  CHECK_THROWS_AS(locate(inside_tail, p), TruncationSaturated);
  CHECK_FALSE(try_locate(inside_tail, p).has_value());
  CHECK(eval_w(inside_tail, p) == 0.0);
  CHECK(p.tail_height_bound() == doctest::Approx(std::pow(50.0, -1.0)));
}

TEST_CASE("derivative and its transition points") {
  const BumpParams& p = half_two();
  CHECK(eval_w_prime(4.125, p) == doctest::Approx(0.5 / std::sqrt(0.125)).epsilon(1e-13));
  CHECK(eval_w_prime(4.3, p) == 0.0);
  CHECK(eval_w_prime(4.6, p) == doctest::Approx(-0.5 / std::sqrt(0.15)).epsilon(1e-12));
  CHECK_THROWS_AS(eval_w_prime(4.25, p), NotDifferentiable);
  CHECK_THROWS_AS(eval_w_prime(4.0, p), NotDifferentiable);
  // central differences away from the transition points
  for (double x : {4.05, 4.2, 4.55, 5.1, 5.3}) {
    const double h = 1e-6;
    const double fd = (eval_w(x + h, p) - eval_w(x - h, p)) / (2 * h);
    CHECK(eval_w_prime(x, p) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("cumulative_w matches quadrature of w") {
  const BumpParams& p = half_two();
  CHECK(cumulative_w(4.25, p) == doctest::Approx(std::pow(0.25, 1.5) / 1.5).epsilon(1e-13));
  for (double x : {4.1, 4.4, 4.7, 5.2, 5.6}) {
    double expected = 0.0;
    const auto pts = transition_points(p, 4.0, x);
    double lo = 4.0;
    for (double t : pts) {
      if (t > lo && t < x) {
        expected += quad([&](double s) { return eval_w(s, p); }, lo, t);
        lo = t;
      }
    }
    expected += quad([&](double s) { return eval_w(s, p); }, lo, x);
    CHECK(cumulative_w(x, p) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("total mass is the block sum") {
  const BumpParams& p = half_two();
  const double expected = (2 / 1.5 + 1) * (boost::math::zeta(3.0) - 1);
  CHECK(p.mass_table().total_mass() == doctest::Approx(expected).epsilon(1e-13));
  CHECK(w_lp_norm(1.0, p) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(cumulative_w(p.a_inf() + 1, p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("closed-form norms of w") {
  const BumpParams& p = half_two();
  CHECK(w_lp_norm(INFINITY, p) == doctest::Approx(0.5));
  // (2/2 + 1)(ζ(4) - 1) under the square root
  const double l2 = std::sqrt(2 * (boost::math::zeta(4.0) - 1));
  CHECK(w_lp_norm(2.0, p) == doctest::Approx(l2).epsilon(1e-13));
  CHECK(l2 == doctest::Approx(0.40577).epsilon(1e-5));
}

TEST_CASE("closed-form norms of w' and divergence") {
  const BumpParams& p = half_two();
  CHECK_FALSE(w_prime_lp_norm(1.0, p).has_value());
  const auto n08 = w_prime_lp_norm(0.8, p);
  REQUIRE(n08.has_value());
  const double e = 1 + (0.5 - 1) * 0.8;
  const double expected = std::pow(2 * std::pow(0.5, 0.8) / e * (boost::math::zeta(2 * e) - 1), 1 / 0.8);
  CHECK(*n08 == doctest::Approx(expected).epsilon(1e-12));
  CHECK(w_prime_in_lp(INFINITY, 1.0, 2.0));
  CHECK_FALSE(w_prime_in_lp(INFINITY, 0.5, 2.0));
  CHECK(w_prime_in_lp(5.0, 1.5, 2.0));
}

TEST_CASE("power law w_{gamma sigma} = w_sigma^gamma") {
  const BumpParams& p = half_two();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(3.9, breakpoint(20'000, p));
  for (double gamma : {0.5, 2.0, 3.0}) {
    const BumpParams q = p.with_sigma(gamma * p.sigma());
    for (int i = 0; i < 2000; ++i) {
      const double xi = dist(rng);
      CHECK(std::abs(eval_w(xi, q) - std::pow(eval_w(xi, p), gamma)) <= 1e-13);
    }
  }
}

TEST_CASE("with_sigma shares the block table") {
  const BumpParams& p = half_two();
  const BumpParams q = p.with_sigma(0.75);
  CHECK(&q.breakpoint_table() == &p.breakpoint_table());
  CHECK(q.sigma() == 0.75);
  CHECK(q.theta() == p.theta());
}

TEST_CASE("u vanishes outside the annulus and integrates v") {
  const BumpParams& p = half_two();
  for (int i = 0; i < 100; ++i) {
    CHECK(std::abs(eval_u(0.76 + 0.74 * i / 99.0, p)) <= 1e-12);
    CHECK(std::abs(eval_u(0.24 * i / 99.0, p)) <= 1e-12);
  }
  const double mass = p.mass_table().total_mass();
  CHECK(eval_u(0.5, p) == doctest::Approx(mass / (16 * boost::math::zeta(2.0))).epsilon(1e-12));
  CHECK(eval_u(0.5, p) == doctest::Approx(0.017914).epsilon(1e-4));
  // u' = v away from transition pull-backs
  for (double r : {0.3, 0.4, 0.45, 0.6, 0.7}) {
    const double h = 1e-7;
    const double fd = (eval_u(r + h, p) - eval_u(r - h, p)) / (2 * h);
    CHECK(fd == doctest::Approx(eval_v(r, p)).epsilon(1e-5).scale(1e-6));
  }
}

TEST_CASE("the negative lobe is the positive lobe shifted by 1/4") {
  const BumpParams& p = half_two();
  for (double r : {0.3, 0.41, 0.44, 0.47, 0.49}) {
    CHECK(eval_v(r + 0.25, p) == doctest::Approx(-eval_v(r, p)).epsilon(1e-10).scale(1e-12));
    const LobeArguments t = lobe_arguments(r, p);
    CHECK(eval_v(r, p) == doctest::Approx(eval_w(t.positive, p) - eval_w(t.negative, p)));
    CHECK(positive_lobe_radius(t.positive, p) == doctest::Approx(r).epsilon(1e-14));
    CHECK(negative_lobe_radius(t.negative, p) == doctest::Approx(r).epsilon(1e-14));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(BumpParams(0.0, 2.0), DomainError);
  CHECK_THROWS_AS(BumpParams(0.5, 1.0), DomainError);
  CHECK(to_string(Phase::Plateau) != nullptr);
}

TEST_CASE("norm checks at rho = inf use the sampled sup") {
  for (double theta : {1.5, 2.0, 3.0}) {
    for (double sigma : {0.25, 1.0, 2.5}) {
      const BumpParams params(sigma, theta, 64);
      const double c2 = std::pow(2.0, -theta);
      const NormCheck w = check_w_norm(INFINITY, params);
      CHECK(w.agree);
      REQUIRE(w.oracle);
      CHECK(*w.oracle == doctest::Approx(std::pow(c2, sigma)).epsilon(1e-12));
      const NormCheck wp = check_w_prime_norm(INFINITY, params);
      CHECK(wp.agree);
      if (sigma < 1) {
        CHECK_FALSE(wp.oracle);
      } else {
        REQUIRE(wp.oracle);
        CHECK(*wp.oracle == doctest::Approx(sigma * std::pow(c2, sigma - 1)).epsilon(1e-8));
      }
    }
  }
  CHECK(check_w_norm(2.0, BumpParams(0.5, 2.0, 64)).agree);
}
