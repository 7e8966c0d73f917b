#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pbesov/harness.hpp"

using namespace pbesov;

TEST_CASE("main selection: worked example") {
  const MainTheoremConfig c = select_params_main(3, 0.5, 2, 0.05);
  CHECK(c.theta == doctest::Approx(1 / 0.975).epsilon(1e-15));
  CHECK(c.sigma == doctest::Approx(0.25 - 0.025 / 4).epsilon(1e-14));
  CHECK(c.sigma == doctest::Approx(0.24375).epsilon(1e-14));
  CHECK(c.dual_sigma() == doctest::Approx(0.4875).epsilon(1e-14));
  CHECK(c.s_rho(kInf) == doctest::Approx(c.sigma).epsilon(1e-14));
  CHECK(c.s_tilde_rho(kInf) == doctest::Approx(c.dual_sigma()).epsilon(1e-14));
  // s_ρ is σ + (1-1/θ)/ρ for the primal, s̃_ρ the same for (p-1)σ
  for (double rho : {1.0, 2.0, 4.0}) {
    CHECK(c.s_rho(rho) == doctest::Approx(c.sigma + 0.025 / rho).epsilon(1e-14));
    CHECK(c.s_tilde_rho(rho) == doctest::Approx(c.dual_sigma() + 0.025 / rho).epsilon(1e-14));
  }
}

TEST_CASE("main selection: mu = inf and hypothesis violations") {
  CHECK(select_params_main(3, 0.5, kInf, 0.05).sigma == 0.25);
  CHECK(select_params_main(2, 0.3, kInf, 0.1).sigma == 0.3);
  CHECK_THROWS_AS(select_params_main(2, 0.3, 1.5, 0.5), HypothesisViolated);  // ε = 1/p
  // ε = 0.2 < 1/p = 0.5: every inequality of the chain holds
  const MainTheoremConfig ok = select_params_main(2, 0.3, 1.5, 0.2);
  CHECK(ok.sigma == doctest::Approx(0.3 - 0.1 / 1.5).epsilon(1e-14));
  CHECK_THROWS_AS(select_params_main(3, 0.05, 2, 0.05), HypothesisViolated);  // λ <= ε(p-1)
  CHECK_THROWS_AS(select_params_main(3, 0.96, 2, 0.05), HypothesisViolated);  // λ >= 1-ε
  CHECK_THROWS_AS(select_params_main(1.5, 0.3, 2, 0.05), HypothesisViolated);
  CHECK_THROWS_AS(select_params_main(3, 0.5, 1.0, 0.05), HypothesisViolated);
  try {
    select_params_main(2, 0.3, 1.5, 0.5);
  } catch (const HypothesisViolated& e) {
    CHECK(e.inequality() == "epsilon < 1/p");
  }
}

TEST_CASE("L selection") {
  const MainTheoremConfig inf = select_params_L(3, kInf, 0.1);
  CHECK(inf.dual_sigma() == 1.0);
  CHECK(inf.lambda == 1.0);
  const MainTheoremConfig c = select_params_L(3, 2, 0.05);
  CHECK(c.sigma == doctest::Approx(0.49375).epsilon(1e-14));
  CHECK(c.dual_sigma() == doctest::Approx(0.9875).epsilon(1e-14));
  CHECK(c.sigma < 1 / c.theta);
  CHECK(1 / c.theta < c.dual_sigma());
  CHECK_THROWS_AS(select_params_L(2, 2, 0.05), HypothesisViolated);
  CHECK_THROWS_AS(select_params_L(3, 2, 0.5), HypothesisViolated);
}

TEST_CASE("explicit theta") {
  const MainTheoremConfig c = with_theta(select_params_main(3, 0.5, 2, 0.05), 1.01);
  CHECK(c.theta == 1.01);
  CHECK(c.sigma == doctest::Approx(0.25 - (1 - 1 / 1.01) / 4).epsilon(1e-14));
  CHECK_THROWS_AS(with_theta(c, 1.2), HypothesisViolated);  // 1/θ <= 1 - ε
}

TEST_CASE("classification of u") {
  const MainTheoremConfig c = select_params_main(3, 0.5, 2, 0.05);
  const MembershipCase r1 = classify_u(kInf, kInf, c);
  CHECK(r1.row == 1);
  CHECK(r1.contained.s == doctest::Approx(1.2));
  CHECK(r1.excluded.s == doctest::Approx(1.25));
  const MembershipCase r2 = classify_u(4, 2, c);
  CHECK(r2.row == 2);
  CHECK(r2.contained.s == doctest::Approx(1.25));
  CHECK(std::isinf(r2.contained.q));
  CHECK(r2.excluded.q == 2);
  const MembershipCase r3 = classify_u(1, 1, c);
  CHECK(r3.row == 3);
  CHECK(r3.contained.s == doctest::Approx(1.25));
  CHECK(r3.excluded.s == doctest::Approx(1.3));
  CHECK(classify_u(4 * (1 + 1e-14), 2, c).row == 2);
  CHECK(classify_u(4.001, 2, c).row == 1);
  CHECK_THROWS_AS(classify_u(0.5, 2, c), PreconditionViolation);
  CHECK_THROWS_AS(classify_u(4, kInf, c), PreconditionViolation);
  CHECK_THROWS_AS(classify_u(2, 0, c), PreconditionViolation);
  CHECK(describe(r2).find("row 2: in B^{1.25}_{4,inf}") != std::string::npos);
}

TEST_CASE("rows 1 and 3 do not depend on q") {
  const MainTheoremConfig c = select_params_main(3, 0.5, 2, 0.05);
  for (double rho : {1.0, 3.0, 6.0, kInf}) {
    const MembershipCase a = classify_u(rho, 1, c);
    for (double q : {0.5, 2.0, kInf}) {
      const MembershipCase b = classify_u(rho, q, c);
      CHECK(b.row == a.row);
      CHECK(b.contained.s == a.contained.s);
      CHECK(b.excluded.s == a.excluded.s);
    }
  }
}

TEST_CASE("classification of the field") {
  const MainTheoremConfig c = select_params_main(3, 0.5, 2, 0.05);
  CHECK(classify_A(kInf, 2, c).row == 1);
  const MembershipCase r2 = classify_A(2, 2, c);
  CHECK(r2.row == 2);
  CHECK(r2.contained.s == doctest::Approx(0.5));
  CHECK(classify_A(1.5, 2, c).row == 3);
  CHECK(classify_A(1.5, 2, c).excluded.s == doctest::Approx(0.55));
  CHECK_FALSE(classify_A(1.5, 2, c).in_sobolev_w1.has_value());
}

TEST_CASE("every row is reached at the table rhos") {
  for (const MainTheoremConfig& c : {select_params_main(3, 0.5, 2, 0.05), select_params_L(3, 2, 0.05)}) {
    const auto rhos = table_rhos(c);
    for (SpaceKind kind : {SpaceKind::SolutionU, SpaceKind::FieldA}) {
      bool seen[4] = {false, false, false, false};
      for (const auto& m : classification_table(kind, rhos, c)) seen[m.row] = true;
      CHECK(seen[1]);
      CHECK(seen[2]);
      CHECK(seen[3]);
    }
  }
}

TEST_CASE("Sobolev verdicts for the field in L mode") {
  const MainTheoremConfig c = select_params_L(3, 2, 0.05);
  CHECK(*classify_A(1.2, 2, c).in_sobolev_w1);
  CHECK(*classify_A(1.5, 2, c).in_sobolev_w1);
  CHECK(*classify_A(1.99, 2, c).in_sobolev_w1);
  CHECK_FALSE(*classify_A(2.01, 2, c).in_sobolev_w1);
  CHECK_FALSE(*classify_A(4, 2, c).in_sobolev_w1);
}

TEST_CASE("shift theorem comparison") {
  const SavareLine s = savare_compare(2, 0.2, 0.05);
  CHECK(s.in_range);
  CHECK(s.guaranteed == doctest::Approx(1.2));
  REQUIRE(s.excluded.has_value());
  CHECK(*s.excluded == doctest::Approx(1.25));
  const SavareLine t = savare_compare(3, 0.5, 0.05);
  CHECK(t.guaranteed == doctest::Approx(1.25));
  CHECK(*t.excluded == doctest::Approx(1.3));
  const SavareLine out = savare_compare(3, 0.8, 0.05);
  CHECK_FALSE(out.in_range);  // 1/p' = 2/3
  CHECK(out.text.find("outside") != std::string::npos);
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(
      R"({"mode":"L","p":3,"mu":"inf","epsilon":0.05,"rho_list":[1.5,"inf"],"seed":9})");
  CHECK(c.mode == TheoremMode::L);
  CHECK(std::isinf(c.mu));
  CHECK(c.rho_list.size() == 2);
  CHECK(std::isinf(c.rho_list[1]));
  CHECK(c.seed == 9);
  CHECK_THROWS_AS(parse_config(R"({"pee":3})"), DomainError);
  CHECK_THROWS_AS(parse_config(R"({"theta":0.9})"), DomainError);
  CHECK_THROWS_AS(parse_config(R"({"mode":"x"})"), DomainError);
  CHECK_THROWS_AS(parse_config("[1,2]"), DomainError);
  CHECK_THROWS_AS(parse_config("{"), DomainError);
}

TEST_CASE("config round trip through JSON") {
  ExperimentConfig c;
  c.mu = kInf;
  c.theta = 1.02;
  c.tolerances.slope = 0.07;
  const ExperimentConfig back = parse_config(config_to_json(c));
  CHECK(std::isinf(back.mu));
  CHECK(*back.theta == 1.02);
  CHECK(back.tolerances.slope == 0.07);
  CHECK(back.h_exponents == c.h_exponents);
  CHECK(back.n_cap == c.n_cap);
}

TEST_CASE("a small experiment runs end to end") {
  ExperimentConfig c = parse_config(
      R"({"p":2,"lambda":0.5,"mu":"inf","epsilon":0.2,"rho_list":["inf",2],
          "h_exponents":[6,7,8,9,10,11,12],"d_list":[1],"n_cap":20000,"weak_n_cap":32})");
  const ExperimentReport r = run_experiment(c);
  CHECK(r.params.has_value());
  CHECK_FALSE(r.checks.empty());
  for (const auto& ch : r.checks) {
    CAPTURE(ch.stage);
    CAPTURE(ch.name);
    CAPTURE(ch.detail);
    CHECK(ch.passed);
  }
  const auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j["passed"].get<bool>() == r.passed());
  CHECK(j["config"]["mu"] == "inf");
  std::ostringstream os;
  write_text_report(os, r);
  CHECK(os.str().find("checks") != std::string::npos);
}

TEST_CASE("a hypothesis violation is reported, not thrown") {
  ExperimentConfig c;
  c.p = 2;
  c.lambda = 0.3;
  c.mu = 1.5;
  c.epsilon = 0.5;
  const ExperimentReport r = run_experiment(c);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(r.params.has_value());
}
