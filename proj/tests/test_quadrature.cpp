#include <cmath>

#include "doctest.h"
#include "pbesov/quadrature.hpp"

using namespace pbesov;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 8, 12, 24}) {
    const GaussRule& rule = gauss_legendre(n);
    CHECK(rule.nodes.size() == n);
    CHECK(rule.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      CAPTURE(n);
      CAPTURE(k);
      const double got = gauss_panel([k](double x) { return std::pow(x, k); }, 0.0, 1.0, n);
      CHECK(got == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("Gauss-Legendre nodes are symmetric and ascending") {
  const GaussRule& rule = gauss_legendre(9);
  for (int i = 0; i < 9; ++i) {
    CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[8 - i]).scale(1.0));
    if (i > 0) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
  }
  CHECK(std::abs(rule.nodes[4]) < 1e-15);
}

TEST_CASE("graded Gauss panel resolves an endpoint power singularity") {
  // ∫_0^1 x^{-1/2} = 2; grading s^4 turns it into a polynomial in s
  const double left = graded_gauss_panel([](double, double dist) { return 1 / std::sqrt(dist); },
                                         0.0, 1.0, 8, 4.0, true);
  CHECK(left == doctest::Approx(2.0).epsilon(1e-13));
  const double right = graded_gauss_panel(
      [](double x, double) { return 1 / std::sqrt(1 - x + 0.0); }, 0.0, 1.0, 8, 4.0, false);
  CHECK(right == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("fixed double-exponential rule on sqrt and its error estimate") {
  const PanelResult r = de_panel([](double, double dl, double) { return std::sqrt(dl); }, 2.0, 3.0);
  CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(r.error < 1e-10);
  const PanelResult s =
      de_panel([](double, double, double dr) { return std::pow(dr, 0.3); }, 0.0, 2.0);
  CHECK(s.value == doctest::Approx(std::pow(2.0, 1.3) / 1.3).epsilon(1e-12));
}

TEST_CASE("tiered rule matches the full rule when the budget is tight") {
  auto f = [](double x, double dl, double dr) { return std::pow(dl, 0.7) * std::pow(dr, 0.2) + x; };
  const PanelResult full = de_panel(f, 1.0, 1.5);
  const PanelResult tight = de_panel_tiered(f, 1.0, 1.5, 1e-15, 0.0);
  CHECK(tight.value == doctest::Approx(full.value).epsilon(1e-14));
  const PanelResult loose = de_panel_tiered(f, 1.0, 1.5, 1e-3, 0.0);
  CHECK(loose.value == doctest::Approx(full.value).epsilon(1e-3));
  CHECK(std::abs(loose.value - full.value) <= 10 * loose.error + 1e-14);
}

TEST_CASE("tiered rule is exact on smooth integrands at the coarse level") {
  auto f = [](double x, double, double) { return std::exp(x); };
  const PanelResult r = de_panel_tiered(f, 0.0, 1.0, 1e-10, 0.0);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-10));
}

TEST_CASE("tanh-sinh wrapper handles x^{-1/2} through the end distances") {
  const PanelResult r =
      tanh_sinh_panel([](double, double dl, double) { return 1 / std::sqrt(dl); }, 5.0, 5.25, 1e-12);
  CHECK(r.value == doctest::Approx(2 * std::sqrt(0.25)).epsilon(1e-11));
  const PanelResult empty = tanh_sinh_panel([](double, double, double) { return 1.0; }, 1.0, 1.0, 1e-12);
  CHECK(empty.value == 0.0);
}
