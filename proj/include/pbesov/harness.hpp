#pragma once

// Experiment driver: parameter selection for the two sharpness theorems,
// membership tables for u and A(∇u), the comparison with the shift theorem
// and the full experiment with its report.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pbesov/besov.hpp"
#include "pbesov/errors.hpp"

namespace pbesov {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class TheoremMode { Main, L };
const char* to_string(TheoremMode mode) noexcept;

struct MainTheoremConfig {
  TheoremMode mode = TheoremMode::Main;
  double p = 3.0;
  double lambda = 0.5;
  double mu = 2.0;        ///< kInf allowed
  double epsilon = 0.05;
  double theta = 0.0;
  double sigma = 0.0;

  double dual_sigma() const noexcept { return (p - 1) * sigma; }
  /// λ/(p-1) + (1/ρ - 1/((p-1)μ))(1 - 1/θ): the Besov exponent of w_σ.
  double s_rho(double rho) const noexcept;
  /// λ + (1/ρ - 1/μ)(1 - 1/θ): the Besov exponent of w_{(p-1)σ}.
  double s_tilde_rho(double rho) const noexcept;
};

/// 1/θ = 1 - ε/2, σ = λ/(p-1) - (1-1/θ)/((p-1)μ). Checks
/// 0 < λ/(p-1) - ε < σ <= (p-1)σ < 1/θ < 1.
MainTheoremConfig select_params_main(double p, double lambda, double mu, double epsilon);

/// λ = 1, 1/θ = 1 - ε/2, σ = 1/(p-1) - (1-1/θ)/((p-1)μ). Checks
/// 0 < σ < 1/θ < (p-1)σ <= 1.
MainTheoremConfig select_params_L(double p, double mu, double epsilon);

/// Re-selects with an explicit θ (1 - ε < 1/θ < 1 required).
MainTheoremConfig with_theta(const MainTheoremConfig& config, double theta);

enum class SpaceKind { SolutionU, FieldA };
const char* to_string(SpaceKind kind) noexcept;

/// B^s_{ρ,q}; q = kInf allowed.
struct BesovSpace {
  double s = 0.0;
  double rho = 1.0;
  double q = kInf;
};

std::string to_string(const BesovSpace& space);

struct MembershipCase {
  SpaceKind space_kind = SpaceKind::SolutionU;
  double rho = 1.0;
  double q = kInf;
  int row = 0;          ///< 1, 2 or 3 of the case table
  BesovSpace contained;
  BesovSpace excluded;
  /// A ∈ (W¹_ρ)^d, decided by the finiteness of ‖w'_{(p-1)σ}‖_{L_ρ}; set for
  /// the field in L mode with 1 < ρ < ∞.
  std::optional<bool> in_sobolev_w1;
};

/// Relative tolerance under which ρ counts as equal to the row-2 threshold.
inline constexpr double kThresholdSnap = 1e-12;

/// Row 1 for μ(p-1) < ρ, row 2 for ρ = μ(p-1) (needs q < ∞), row 3 below.
/// Throws PreconditionViolation for ρ < 1, q <= 0, or q = ∞ on row 2.
MembershipCase classify_u(double rho, double q, const MainTheoremConfig& config);
/// The same with threshold μ and smoothness λ ± ε.
MembershipCase classify_A(double rho, double q, const MainTheoremConfig& config);

std::string describe(const MembershipCase& mc);

struct SavareLine {
  double p = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;
  bool in_range = false;            ///< 0 < λ < 1/p'
  double guaranteed = 0.0;          ///< 1 + λ/(p-1)
  std::optional<double> excluded;   ///< from classify_u at ρ = q = p, μ = ∞
  std::string text;
};

SavareLine savare_compare(double p, double lambda, double epsilon = 0.05);

struct Tolerances {
  double slope = 0.05;
  double norm_relative = 1e-8;
  double weak_absolute = 1e-8;   ///< scaled by 1 + ‖ψ‖_{W¹_∞}
  double strong_relative = 1e-6;
  double invariant = 1e-12;
};

struct ExperimentConfig {
  TheoremMode mode = TheoremMode::Main;
  double p = 3.0;
  double lambda = 0.5;
  double mu = 2.0;
  double epsilon = 0.05;
  std::optional<double> theta;
  std::vector<double> rho_list{1.0, 2.0, 4.0, kInf};
  std::vector<int> h_exponents{6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  std::vector<int> d_list{1, 2};
  Tolerances tolerances;
  std::uint64_t seed = 1;
  long n_cap = 1'000'000;   ///< blocks tabulated for the modulus sweeps
  long weak_n_cap = 64;     ///< blocks of the truncated field in the weak-form stage
};

/// Parses the JSON text of a config file. Unknown keys are rejected, as is
/// an explicit θ outside (1, ∞). Throws DomainError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

MainTheoremConfig select_params(const ExperimentConfig& config);

struct CheckResult {
  std::string stage;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct SlopeResult {
  std::string function;  ///< "w_sigma" or "w_dual"
  double sigma = 0.0;
  double rho = 0.0;
  std::optional<double> predicted;
  ExponentFit fit;
  bool passed = false;
  std::string csv;       ///< file name, empty when no output directory
};

struct ExperimentReport {
  ExperimentConfig config;
  std::optional<MainTheoremConfig> params;
  std::vector<std::string> warnings;
  std::vector<CheckResult> checks;
  std::vector<SlopeResult> slopes;
  std::vector<MembershipCase> table_u;
  std::vector<MembershipCase> table_A;
  std::optional<SavareLine> savare;
  double seconds = 0.0;

  bool passed() const;
};

/// Runs every stage in order; failures are recorded and the run continues.
/// CSV files of the sweeps go to `output_dir` when it is non-empty.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const std::filesystem::path& output_dir = {});
ExperimentReport run_experiment(const std::filesystem::path& config_file,
                                const std::filesystem::path& output_dir = {});

std::string report_to_json(const ExperimentReport& report);
void write_text_report(std::ostream& out, const ExperimentReport& report);

/// Rows of the three-case tables for the given ρ values, q = 2 on row 2.
std::vector<MembershipCase> classification_table(SpaceKind kind,
                                                 const std::vector<double>& rhos,
                                                 const MainTheoremConfig& config);
/// The ρ values at which every row of both tables is hit.
std::vector<double> table_rhos(const MainTheoremConfig& config);

}  // namespace pbesov
