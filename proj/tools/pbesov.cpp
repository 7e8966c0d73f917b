// Command-line front end: eval, norms, modulus, experiment, classify.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pbesov/besov.hpp"
#include "pbesov/bump.hpp"
#include "pbesov/harness.hpp"
#include "pbesov/numeric_norms.hpp"
#include "pbesov/radial.hpp"

namespace {

using nlohmann::json;
using namespace pbesov;

double parse_real(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInf;
  std::size_t used = 0;
  const double x = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: " + s);
  return x;
}

std::vector<double> parse_list(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) out.push_back(parse_real(s));
  return out;
}

std::string show(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

struct ConfigFlags {
  std::string config_file;
  std::optional<std::string> p, lambda, mu, epsilon, theta, mode, tolerances;
  std::vector<std::string> rho_list;
  std::vector<int> h_exponents, d_list;
  std::optional<std::uint64_t> seed;
  std::optional<long> n_cap, weak_n_cap;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "JSON config file");
    app->add_option("--p", p, "exponent p >= 2");
    app->add_option("--lambda", lambda, "smoothness lambda");
    app->add_option("--mu", mu, "integrability mu (\"inf\" allowed)");
    app->add_option("--epsilon", epsilon, "epsilon");
    app->add_option("--theta", theta, "explicit theta (default 1/(1 - epsilon/2))");
    app->add_option("--mode", mode, "main | L");
    app->add_option("--rho_list", rho_list, "integrability exponents");
    app->add_option("--h_exponents", h_exponents, "steps h = 2^-j");
    app->add_option("--d_list", d_list, "dimensions for the weak-form stage");
    app->add_option("--tolerances", tolerances, "JSON object of tolerances");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--n_cap", n_cap, "blocks for the modulus sweeps");
    app->add_option("--weak_n_cap", weak_n_cap, "blocks for the weak-form stage");
  }

  ExperimentConfig build() const {
    json j = json::object();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw DomainError("cannot open " + config_file);
      j = json::parse(in);
    }
    auto real = [&](const char* key, const std::optional<std::string>& v) {
      if (!v) return;
      const double x = parse_real(*v);
      j[key] = std::isinf(x) ? json("inf") : json(x);
    };
    real("p", p);
    real("lambda", lambda);
    real("mu", mu);
    real("epsilon", epsilon);
    real("theta", theta);
    if (mode) j["mode"] = *mode;
    if (!rho_list.empty()) j["rho_list"] = rho_list;
    if (!h_exponents.empty()) j["h_exponents"] = h_exponents;
    if (!d_list.empty()) j["d_list"] = d_list;
    if (tolerances) j["tolerances"] = json::parse(*tolerances);
    if (seed) j["seed"] = *seed;
    if (n_cap) j["n_cap"] = *n_cap;
    if (weak_n_cap) j["weak_n_cap"] = *weak_n_cap;
    return parse_config(j.dump());
  }
};

int run_eval(const std::string& what, double sigma, double theta, double p, int d, long n_cap,
             const std::vector<double>& points) {
  const BumpParams bump(sigma, theta, n_cap);
  const RadialFieldSpec spec = make_radial_field(bump, p, std::max(d, 1));
  for (double x : points) {
    std::cout << show(x) << ' ';
    try {
      if (what == "w") {
        std::cout << show(eval_w(x, bump));
      } else if (what == "wprime") {
        std::cout << show(eval_w_prime(x, bump));
      } else if (what == "v") {
        std::cout << show(eval_v(x, bump));
      } else if (what == "u") {
        std::cout << show(eval_u(x, bump));
      } else if (what == "A") {
        Eigen::VectorXd point = Eigen::VectorXd::Zero(d);
        point[0] = x;
        const Eigen::VectorXd a = eval_A(point, spec);
        for (int i = 0; i < d; ++i) std::cout << (i ? " " : "") << show(a[i]);
      } else if (what == "f") {
        std::cout << show(eval_f_strong(x, spec));
      } else {
        std::cerr << "unknown quantity '" << what << "' (w, wprime, v, u, A, f)\n";
        return 2;
      }
    } catch (const NotDifferentiable&) {
      std::cout << "not-differentiable";
    }
    std::cout << '\n';
  }
  return 0;
}

int run_norms(const std::vector<double>& sigmas, const std::vector<double>& thetas,
              const std::vector<double>& rhos, double tol) {
  std::cout << std::left << std::setw(5) << "norm" << std::setw(8) << "sigma" << std::setw(8)
            << "theta" << std::setw(8) << "rho" << std::setw(22) << "closed form"
            << std::setw(22) << "quadrature" << std::setw(12) << "rel.diff" << "agree\n";
  bool all = true;
  for (double s : sigmas) {
    for (double t : thetas) {
      const BumpParams bump(s, t, 64);
      for (double r : rhos) {
        for (const NormCheck& c : {check_w_norm(r, bump, tol), check_w_prime_norm(r, bump, tol)}) {
          all = all && c.agree;
          std::cout << std::left << std::setw(5) << c.quantity << std::setw(8) << show(s)
                    << std::setw(8) << show(t) << std::setw(8) << show(r) << std::setw(22)
                    << (c.closed_form ? show(*c.closed_form) : "divergent") << std::setw(22)
                    << (c.oracle ? show(*c.oracle) : "divergent") << std::setw(12)
                    << std::setprecision(3) << c.relative_difference
                    << (c.agree ? "yes" : "NO") << '\n';
        }
      }
    }
  }
  return all ? 0 : 1;
}

int run_modulus(double sigma, double theta, double rho, int j_min, int j_max, long n_cap,
                const std::string& output, bool fit) {
  const BumpTrain w(BumpParams(sigma, theta, n_cap));
  const auto steps = dyadic_steps(theta, j_max, j_min);
  const auto samples = modulus_sweep(w, rho, steps);
  if (output.empty() || output == "-") {
    write_csv(std::cout, samples);
  } else {
    std::ofstream out(output);
    write_csv(out, samples);
  }
  if (fit) {
    const ExponentFit f = fit_exponent(samples);
    std::cerr << "slope " << show(f.slope) << " residual " << show(f.residual);
    try {
      std::cerr << " predicted " << show(predicted_exponent(rho, sigma, theta));
    } catch (const OutOfValidity& e) {
      std::cerr << " predicted " << show(e.value()) << " (outside the proven region)";
    }
    std::cerr << '\n';
  }
  return 0;
}

int run_experiment_cmd(const ConfigFlags& flags, const std::string& out_dir, bool json_out) {
  const ExperimentConfig config = flags.build();
  const ExperimentReport report = run_experiment(config, out_dir);
  if (!out_dir.empty()) {
    std::ofstream(std::filesystem::path(out_dir) / "report.json") << report_to_json(report) << '\n';
    std::ofstream text(std::filesystem::path(out_dir) / "report.txt");
    write_text_report(text, report);
  }
  if (json_out) {
    std::cout << report_to_json(report) << '\n';
  } else {
    write_text_report(std::cout, report);
  }
  return report.passed() ? 0 : 1;
}

int run_classify(const ConfigFlags& flags, const std::vector<double>& rhos, double q) {
  const ExperimentConfig config = flags.build();
  const MainTheoremConfig mc = select_params(config);
  std::cout << "mode " << to_string(mc.mode) << ": theta=" << show(mc.theta)
            << " sigma=" << show(mc.sigma) << " (p-1)sigma=" << show(mc.dual_sigma()) << '\n';
  const auto list = rhos.empty() ? table_rhos(mc) : rhos;
  for (SpaceKind kind : {SpaceKind::SolutionU, SpaceKind::FieldA}) {
    std::cout << '\n' << to_string(kind) << '\n';
    for (double rho : list) {
      const double threshold = kind == SpaceKind::SolutionU ? mc.mu * (mc.p - 1) : mc.mu;
      const double row_q = std::isinf(q) && rho == threshold ? 2.0 : q;
      const MembershipCase m =
          kind == SpaceKind::SolutionU ? classify_u(rho, row_q, mc) : classify_A(rho, row_q, mc);
      std::cout << "  " << describe(m) << '\n';
    }
  }
  const SavareLine line =
      savare_compare(mc.p, mc.lambda, mc.epsilon);
  std::cout << "\nshift theorem: " << line.text << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharpness of Besov regularity for the p-Poisson problem"};
  app.require_subcommand(1);

  auto* eval = app.add_subcommand("eval", "pointwise values of w, w', v, u, A or f");
  std::string what = "w";
  double sigma = 0.5;
  double theta = 2.0;
  double p = 2.0;
  int d = 1;
  long n_cap = BumpParams::kDefaultBlockCap;
  std::vector<std::string> points;
  eval->add_option("quantity", what, "w | wprime | v | u | A | f")->required();
  eval->add_option("points", points, "evaluation points (xi for w, r otherwise)")->required();
  eval->add_option("--sigma", sigma, "exponent sigma");
  eval->add_option("--theta", theta, "decay theta > 1");
  eval->add_option("--p", p, "exponent p (A and f)");
  eval->add_option("--d", d, "dimension (A and f)");
  eval->add_option("--n_cap", n_cap, "tabulated blocks");

  auto* norms = app.add_subcommand("norms", "closed-form norms against quadrature");
  std::vector<std::string> sigmas{"0.25", "0.5", "0.9"};
  std::vector<std::string> thetas{"1.5", "2"};
  std::vector<std::string> rhos{"1", "2"};
  double norm_tol = 1e-8;
  norms->add_option("--sigma", sigmas, "sigma values");
  norms->add_option("--theta", thetas, "theta values");
  norms->add_option("--rho", rhos, "rho values");
  norms->add_option("--tol", norm_tol, "relative agreement tolerance");

  auto* modulus = app.add_subcommand("modulus", "sweep of |Delta_h w|_rho to CSV");
  std::string rho_text = "2";
  int j_min = 6;
  int j_max = 16;
  long sweep_cap = 100'000;
  std::string output;
  bool fit = false;
  modulus->add_option("--sigma", sigma, "exponent sigma");
  modulus->add_option("--theta", theta, "decay theta > 1");
  modulus->add_option("--rho", rho_text, "integrability (\"inf\" allowed)");
  modulus->add_option("--j_min", j_min, "largest step 2^-j_min");
  modulus->add_option("--j_max", j_max, "smallest step 2^-j_max");
  modulus->add_option("--n_cap", sweep_cap, "tabulated blocks");
  modulus->add_option("-o,--output", output, "CSV file (stdout by default)");
  modulus->add_flag("--fit", fit, "print the fitted slope to stderr");

  auto* experiment = app.add_subcommand("experiment", "full run with report");
  ConfigFlags exp_flags;
  exp_flags.attach(experiment);
  std::string out_dir;
  bool json_out = false;
  experiment->add_option("--output_dir", out_dir, "directory for report.json, report.txt, CSVs");
  experiment->add_flag("--json", json_out, "print the JSON report instead of text");

  auto* classify = app.add_subcommand("classify", "membership case tables");
  ConfigFlags cls_flags;
  cls_flags.attach(classify);
  std::vector<std::string> cls_rhos;
  std::string q_text = "inf";
  classify->add_option("--rho", cls_rhos, "rho values (default: one per table row)");
  classify->add_option("--q", q_text, "fine index q (row 2 uses q = 2 when q = inf)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eval) {
      std::vector<double> xs = parse_list(points);
      return run_eval(what, sigma, theta, p, d, n_cap, xs);
    }
    if (*norms) {
      return run_norms(parse_list(sigmas), parse_list(thetas), parse_list(rhos), norm_tol);
    }
    if (*modulus) {
      return run_modulus(sigma, theta, parse_real(rho_text), j_min, j_max, sweep_cap, output, fit);
    }
    if (*experiment) return run_experiment_cmd(exp_flags, out_dir, json_out);
    if (*classify) return run_classify(cls_flags, parse_list(cls_rhos), parse_real(q_text));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
