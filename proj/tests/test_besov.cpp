#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "pbesov/besov.hpp"

using namespace pbesov;

namespace {

// Independent reference: tanh-sinh of |Δ_h w|^ρ between every transition
// point of w and of w(· + h), straight from eval_w.
double reference_norm(const BumpParams& p, double h, double rho, Interval win) {
  std::vector<double> cuts{win.lo, win.hi};
  for (double t : transition_points(p, win.lo, win.hi)) cuts.push_back(t);
  for (double t : transition_points(p, win.lo + h, win.hi + h)) cuts.push_back(t - h);
  std::sort(cuts.begin(), cuts.end());
  boost::math::quadrature::tanh_sinh<double> ts(10);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::max(cuts[i], win.lo);
    const double b = std::min(cuts[i + 1], win.hi);
    if (!(b > a)) continue;
    total += ts.integrate(
        [&](double x) { return std::pow(std::abs(eval_w(x + h, p) - eval_w(x, p)), rho); }, a, b, 1e-13);
  }
  return std::pow(total, 1 / rho);
}

}  // namespace

TEST_CASE("gap identity: the example value") {
  const BumpParams p(0.5, 2.0, 1000);
  CHECK(exact_gap_diff(2, 0.01, 2.0, p) == doctest::Approx(5e-5).epsilon(1e-14));
  const ModulusSample s = diff_norm(BumpTrain(p), 0.01, 2.0, gap_window(2, p));
  CHECK(s.value == doctest::Approx(std::sqrt(5e-5)).epsilon(1e-10));
  CHECK(s.value == doctest::Approx(7.0711e-3).epsilon(1e-4));
}

TEST_CASE("gap identity with and without closed-form panels") {
  const BumpParams p(0.5, 2.0, 1000);
  for (bool closed : {true, false}) {
    DiffNormOptions opt;
    opt.closed_form_single_piece = closed;
    for (long n = 2; n <= 6; ++n) {
      for (double rho : {1.0, 1.5, 2.0, 3.0}) {
        const double h = std::pow(static_cast<double>(n + 1), -2.0) / 2;
        const double expected = std::pow(exact_gap_diff(n, h, rho, p), 1 / rho);
        const ModulusSample s = diff_norm(BumpTrain(p), h, rho, gap_window(n, p), opt);
        CAPTURE(n);
        CAPTURE(rho);
        CHECK(s.value == doctest::Approx(expected).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("diff_norm on the full support agrees with the Gauss-Kronrod reference") {
  const BumpParams p(0.4, 2.0, 60);
  for (double rho : {1.0, 2.0, 3.5}) {
    for (double h : {1.0 / 64, 1.0 / 512}) {
      const Interval win = support_window(p, h);
      const double ref = reference_norm(p, h, rho, win);
      const ModulusSample s = diff_norm(BumpTrain(p), h, rho, win);
      CAPTURE(rho);
      CAPTURE(h);
      CHECK(s.value == doctest::Approx(ref).epsilon(1e-8));
    }
  }
}

TEST_CASE("gap lower bound never exceeds the full norm") {
  const BumpParams p(0.3, 1.5, 20'000);
  for (double h : {1.0 / 64, 1.0 / 256, 1.0 / 1024}) {
    const double full = diff_norm(BumpTrain(p), h, 2.0, support_window(p, h)).value;
    CHECK(std::pow(gap_lower_bound(h, 2.0, p), 0.5) <= full * (1 + 1e-12));
  }
}

TEST_CASE("sup norm of the difference sits between h^sigma and 2h^sigma") {
  const BumpParams p(0.3, 2.0, 10'000);
  for (double h : dyadic_steps(2.0, 12, 6)) {
    const ModulusSample s = diff_norm(BumpTrain(p), h, INFINITY, support_window(p, h));
    CHECK(s.value >= std::pow(h, 0.3) * (1 - 1e-12));
    CHECK(s.value <= 2 * std::pow(h, 0.3) * (1 + 1e-12));
  }
}

TEST_CASE("predicted exponent and its validity region") {
  CHECK(predicted_exponent(INFINITY, 0.3, 2.0) == doctest::Approx(0.3));
  CHECK(predicted_exponent(2.0, 0.25, 2.0) == doctest::Approx(0.5));
  CHECK(predicted_exponent(1.0, 0.25, 2.0) == doctest::Approx(0.75));
  CHECK(in_validity_region(1.0, 0.25, 2.0));
  CHECK_FALSE(in_validity_region(1.0, 0.5, 2.0));  // (1-σ)/(1-1/θ) = 1 = 1/ρ
  try {
    predicted_exponent(1.0, 0.5, 2.0);
    FAIL("expected OutOfValidity");
  } catch (const OutOfValidity& e) {
    CHECK(e.value() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(predicted_exponent(2.0, 0.6, 2.0), OutOfValidity);  // σ >= 1/θ
}

TEST_CASE("fit_exponent recovers an exact power law") {
  std::vector<ModulusSample> samples;
  for (int j = 4; j <= 14; ++j) {
    ModulusSample s;
    s.h = std::ldexp(1.0, -j);
    s.rho = 2;
    s.value = 3.7 * std::pow(s.h, 0.6125);
    samples.push_back(s);
  }
  const ExponentFit fit = fit_exponent(samples);
  CHECK(std::abs(fit.slope - 0.6125) <= 1e-12);
  CHECK(fit.intercept == doctest::Approx(std::log(3.7)).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);
  CHECK(fit.sample_count == 11);
  samples.resize(5);
  CHECK_THROWS_AS(fit_exponent(samples), InsufficientSamples);
}

TEST_CASE("fitted slope for the worked example") {
  const BumpParams p(0.5, 2.0, 30'000);
  const auto steps = dyadic_steps(2.0, 16, 6);
  const auto samples = modulus_sweep(BumpTrain(p), 2.0, steps);
  CHECK(std::abs(fit_exponent(samples).slope - 0.75) <= 0.05);
}

TEST_CASE("dyadic steps respect the admissible range") {
  const auto steps = dyadic_steps(2.0, 10);
  REQUIRE_FALSE(steps.empty());
  CHECK(steps.front() <= max_admissible_step(2.0));
  CHECK(steps.back() == std::ldexp(1.0, -10));
  CHECK(dyadic_steps(2.0, 10, 8).size() == 3);
  CHECK(BlockCounter::of(std::pow(10.0, -2.0), 2.0).N_h == 4);  // ⌈10/3⌉
}

TEST_CASE("the sweep equals serial evaluation") {
  const BumpParams p(0.35, 1.8, 5000);
  const auto steps = dyadic_steps(1.8, 10, 6);
  const auto swept = modulus_sweep(BumpTrain(p), 1.5, steps);
  REQUIRE(swept.size() == steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto serial = diff_norm(BumpTrain(p), steps[i], 1.5, support_window(p, steps[i]));
    CHECK(swept[i].h == steps[i]);
    CHECK(swept[i].value == serial.value);
  }
}

TEST_CASE("generic functions: sin and constants") {
  struct Sine {
    double operator()(double x) const { return std::sin(x); }
  };
  const double pi = 3.14159265358979323846;
  // ‖sin(x+h) - sin(x)‖_{L_2(0, 2π)} = √π · 2|sin(h/2)|
  for (double h : {0.1, 0.01}) {
    const ModulusSample s = diff_norm(Sine{}, h, 2.0, Interval{0.0, 2 * pi});
    CHECK(s.value == doctest::Approx(std::sqrt(pi) * 2 * std::sin(h / 2)).epsilon(1e-10));
    const ModulusSample m = diff_norm(Sine{}, h, INFINITY, Interval{0.0, 2 * pi});
    CHECK(m.value == doctest::Approx(2 * std::sin(h / 2)).epsilon(1e-6));
  }
  struct Constant {
    double operator()(double) const { return 2.5; }
  };
  CHECK(diff_norm(Constant{}, 0.1, 1.0, Interval{0.0, 1.0}).value == 0.0);
  CHECK_THROWS_AS(diff_norm(Constant{}, 0.0, 1.0, Interval{0.0, 1.0}), PreconditionViolation);
}

TEST_CASE("CSV output") {
  ModulusSample s;
  s.h = 0.1;
  s.rho = INFINITY;
  s.value = 1.0 / 3.0;
  s.method = ModulusMethod::SupSampling;
  std::ostringstream os;
  write_csv(os, {s});
  const std::string text = os.str();
  CHECK(text.rfind("h,rho,value,method\n", 0) == 0);
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
