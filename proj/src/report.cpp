#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "pbesov/harness.hpp"

namespace pbesov {
namespace {

using nlohmann::json;

json number(double x) {
  if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
  if (std::isnan(x)) return json(nullptr);
  return json(x);
}

json space_json(const BesovSpace& s) {
  return {{"s", number(s.s)}, {"rho", number(s.rho)}, {"q", number(s.q)}};
}

json case_json(const MembershipCase& m) {
  json j{{"space", to_string(m.space_kind)},
         {"rho", number(m.rho)},
         {"q", number(m.q)},
         {"row", m.row},
         {"in", space_json(m.contained)},
         {"not_in", space_json(m.excluded)}};
  if (m.in_sobolev_w1) j["in_W1_rho"] = *m.in_sobolev_w1;
  return j;
}

std::string num(double x, int digits = 6) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

}  // namespace

std::string report_to_json(const ExperimentReport& r) {
  json j;
  j["config"] = json::parse(config_to_json(r.config));
  if (r.params) {
    const auto& m = *r.params;
    j["parameters"] = {{"mode", to_string(m.mode)}, {"theta", m.theta},
                       {"sigma", m.sigma},          {"dual_sigma", m.dual_sigma()}};
    json pred = json::array();
    for (double rho : r.config.rho_list) {
      pred.push_back({{"rho", number(rho)},
                      {"s_rho", number(m.s_rho(rho))},
                      {"s_tilde_rho", number(m.s_tilde_rho(rho))}});
    }
    j["predicted"] = pred;
  }
  j["warnings"] = r.warnings;
  json slopes = json::array();
  for (const auto& s : r.slopes) {
    json e{{"function", s.function},
           {"sigma", s.sigma},
           {"rho", number(s.rho)},
           {"slope", number(s.fit.slope)},
           {"intercept", number(s.fit.intercept)},
           {"residual", number(s.fit.residual)},
           {"samples", s.fit.sample_count},
           {"passed", s.passed}};
    e["predicted"] = s.predicted ? number(*s.predicted) : json(nullptr);
    if (!s.csv.empty()) e["csv"] = s.csv;
    slopes.push_back(e);
  }
  j["slopes"] = slopes;
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"stage", c.stage},
                      {"name", c.name},
                      {"passed", c.passed},
                      {"measured", number(c.measured)},
                      {"tolerance", number(c.tolerance)},
                      {"detail", c.detail}});
  }
  j["checks"] = checks;
  j["table_u"] = json::array();
  for (const auto& m : r.table_u) j["table_u"].push_back(case_json(m));
  j["table_A"] = json::array();
  for (const auto& m : r.table_A) j["table_A"].push_back(case_json(m));
  if (r.savare) {
    j["savare"] = {{"p", r.savare->p},
                   {"lambda", r.savare->lambda},
                   {"in_range", r.savare->in_range},
                   {"guaranteed", r.savare->guaranteed},
                   {"excluded", r.savare->excluded ? number(*r.savare->excluded) : json(nullptr)},
                   {"text", r.savare->text}};
  }
  j["seconds"] = r.seconds;
  j["passed"] = r.passed();
  return j.dump(2);
}

void write_text_report(std::ostream& out, const ExperimentReport& r) {
  const auto& c = r.config;
  out << "Sharpness experiment (" << to_string(c.mode) << " mode)\n";
  const double lambda = r.params ? r.params->lambda : c.lambda;
  out << "  p=" << num(c.p) << " lambda=" << num(lambda) << " mu=" << num(c.mu)
      << " epsilon=" << num(c.epsilon) << " seed=" << c.seed << " n_cap=" << c.n_cap << "\n";
  if (r.params) {
    out << "  theta=" << num(r.params->theta, 10) << " sigma=" << num(r.params->sigma, 10)
        << " (p-1)sigma=" << num(r.params->dual_sigma(), 10) << "\n";
  }
  for (const auto& w : r.warnings) out << "  warning: " << w << "\n";

  if (r.params) {
    out << "\nPredicted exponents\n";
    out << "  " << std::setw(8) << "rho" << std::setw(14) << "s_rho" << std::setw(14)
        << "s~_rho" << "\n";
    for (double rho : c.rho_list) {
      out << "  " << std::setw(8) << num(rho) << std::setw(14) << num(r.params->s_rho(rho), 8)
          << std::setw(14) << num(r.params->s_tilde_rho(rho), 8) << "\n";
    }
  }

  if (!r.slopes.empty()) {
    out << "\nFitted slopes\n";
    out << "  " << std::left << std::setw(10) << "function" << std::right << std::setw(8)
        << "rho" << std::setw(12) << "slope" << std::setw(12) << "predicted" << std::setw(12)
        << "residual" << "  verdict\n";
    for (const auto& s : r.slopes) {
      out << "  " << std::left << std::setw(10) << s.function << std::right << std::setw(8)
          << num(s.rho) << std::setw(12) << num(s.fit.slope, 5) << std::setw(12)
          << (s.predicted ? num(*s.predicted, 5) : std::string("-")) << std::setw(12)
          << num(s.fit.residual, 3) << "  "
          << (s.predicted ? (s.passed ? "ok" : "FAIL") : "not claimed") << "\n";
    }
  }

  auto table = [&](const char* title, const std::vector<MembershipCase>& rows) {
    if (rows.empty()) return;
    out << "\n" << title << "\n";
    for (const auto& m : rows) out << "  " << describe(m) << "\n";
  };
  table("Classification of u", r.table_u);
  table("Classification of A(grad u)", r.table_A);
  if (r.savare) out << "\nShift theorem: " << r.savare->text << "\n";

  out << "\nChecks\n";
  std::size_t failed = 0;
  for (const auto& ch : r.checks) {
    if (!ch.passed) ++failed;
    out << "  [" << (ch.passed ? "pass" : "FAIL") << "] " << ch.stage << ": " << ch.name
        << "  measured " << num(ch.measured, 3) << " tol " << num(ch.tolerance, 3);
    if (!ch.detail.empty()) out << "  (" << ch.detail << ")";
    out << "\n";
  }
  out << "\n" << (r.passed() ? "PASS" : "FAIL") << ": " << r.checks.size() - failed << "/"
      << r.checks.size() << " checks, " << num(r.seconds, 3) << " s\n";
}

}  // namespace pbesov
