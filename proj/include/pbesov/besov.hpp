#pragma once

// First-order difference norms ‖Δ_h g‖_{L_ρ}, the exact gap identity for the
// bump train, predicted critical exponents and log-log slope fitting.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pbesov/bump.hpp"
#include "pbesov/errors.hpp"
#include "pbesov/quadrature.hpp"

namespace pbesov {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const noexcept { return hi - lo; }
};

enum class ModulusMethod { ClosedForm, GridQuadrature, SupSampling };

const char* to_string(ModulusMethod method) noexcept;

struct ModulusSample {
  double h = 0.0;
  double rho = 0.0;
  double value = 0.0;  ///< ‖Δ_h g‖_{L_ρ(window)}
  ModulusMethod method = ModulusMethod::GridQuadrature;
  double error_bound = 0.0;
};

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< max |log value - fitted line|
  std::pair<double, double> h_range{0.0, 0.0};
  int sample_count = 0;
};

/// N(h, θ) = ⌈h^{-1/θ}/3⌉: blocks n <= N(h, θ) have gaps wide enough for h.
struct BlockCounter {
  long N_h = 0;
  static BlockCounter of(double h, double theta);
};

/// Largest step (1/6)^θ for which the scaling bounds are proven.
double max_admissible_step(double theta);

struct DiffNormOptions {
  /// The fixed double-exponential rule is kept when its error estimate is
  /// below this fraction of the panel value; otherwise adaptive tanh-sinh runs.
  double fixed_rule_tol = 1e-10;
  /// Absolute per-panel error allowance, as a fraction of the exact gap
  /// contribution Σ exact_gap_diff over the gaps inside the window. Lets the
  /// many tiny panels near the accumulation point use the coarse levels.
  double panel_budget = 1e-14;
  double panel_tol = 1e-12;     ///< adaptive tanh-sinh tolerance per panel
  /// Relative (summed) error estimate above which GridTooCoarse is raised.
  double accept_tol = 1e-6;
  /// Exact panel integrals where one side vanishes, for ρ = 1, and for
  /// constant-vs-ramp panels at ρ = 2.
  bool closed_form_single_piece = true;
  int uniform_panels = 256;     ///< generic functions without breakpoints
  long sup_samples = 1 << 14;   ///< dense fallback for ρ = ∞
};

template <class G>
concept ScalarFunction = requires(const G& g, double x) {
  { g(x) } -> std::convertible_to<double>;
};

/// A function that can list its non-smooth points inside [lo, hi].
template <class G>
concept HasBreakpoints = ScalarFunction<G> && requires(const G& g, double lo, double hi) {
  { g.breakpoints(lo, hi) } -> std::convertible_to<std::vector<double>>;
};

/// w_{σ,θ} as a function object.
class BumpTrain {
 public:
  explicit BumpTrain(BumpParams params) : params_(std::move(params)) {}
  double operator()(double xi) const { return eval_w(xi, params_); }
  std::vector<double> breakpoints(double lo, double hi) const {
    return transition_points(params_, lo, hi);
  }
  const BumpParams& params() const noexcept { return params_; }

 private:
  BumpParams params_;
};

/// supp(w) inflated by h on the left: [4 - h, a_inf].
Interval support_window(const BumpParams& params, double h);
/// The gap segment R_n = [a_n + 3c_n, a_{n+1}).
Interval gap_window(long n, const BumpParams& params);

/// ‖Δ_h w‖_{L_ρ(window)} for the bump train. Panels are split at 𝒫_θ, 𝒫_θ - h
/// and at the zero crossings of Δ_h w, so every panel integrand is smooth up
/// to algebraic endpoint behaviour. For ρ = ∞ the difference is monotone on
/// each panel, so the sup is read off the panel ends and then checked against a
/// dense sample with the Hölder certificate.
ModulusSample diff_norm(const BumpTrain& w, double h, double rho, Interval window,
                        const DiffNormOptions& options = {});

/// h^{σρ+1}/(σρ+1) = ‖Δ_h w‖^ρ_{L_ρ(R_n)} for h <= (n+1)^{-θ}.
double exact_gap_diff(long n, double h, double rho, const BumpParams& params);

/// Σ_{n=2}^{N(h,θ)} exact_gap_diff(n, h, ρ): a lower bound for ‖Δ_h w‖^ρ_{L_ρ}.
double gap_lower_bound(double h, double rho, const BumpParams& params);

/// 0 < σ < 1/θ and 1/ρ < min{θ(1+σ), (1-σ)/(1-1/θ)}.
bool in_validity_region(double rho, double sigma, double theta);

/// σ + (1 - 1/θ)/ρ. Throws OutOfValidity (carrying the value) outside the
/// region where the characterization is proven.
double predicted_exponent(double rho, const BumpParams& params);
double predicted_exponent(double rho, double sigma, double theta);

/// Least-squares slope of log value against log h. Needs >= 6 samples with
/// positive values.
ExponentFit fit_exponent(const std::vector<ModulusSample>& samples);

/// h_j = 2^{-j} for j = max(j_min, ⌈log2 6^θ⌉) .. j_max.
std::vector<double> dyadic_steps(double theta, int j_max = 16, int j_min = 0);

/// diff_norm at every step, fanned out over a worker pool.
std::vector<ModulusSample> modulus_sweep(const BumpTrain& w, double rho,
                                         const std::vector<double>& steps,
                                         const DiffNormOptions& options = {});

/// CSV with header `h,rho,value,method`, numbers at 17 significant digits.
void write_csv(std::ostream& out, const std::vector<ModulusSample>& samples);
std::string format_double(double x);

namespace detail {

template <class G>
std::vector<double> panel_edges(const G& g, double h, Interval window, int uniform_panels) {
  std::vector<double> edges{window.lo, window.hi};
  if constexpr (HasBreakpoints<G>) {
    for (double p : g.breakpoints(window.lo, window.hi)) edges.push_back(p);
    for (double p : g.breakpoints(window.lo + h, window.hi + h)) edges.push_back(p - h);
  } else {
    for (int i = 1; i < uniform_panels; ++i) {
      edges.push_back(window.lo + window.length() * i / uniform_panels);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges.erase(std::remove_if(edges.begin(), edges.end(),
                             [&](double e) { return e < window.lo || e > window.hi; }),
              edges.end());
  return edges;
}

}  // namespace detail

/// Generic ‖Δ_h g‖_{L_ρ(window)}: tanh-sinh on panels (split at breakpoints
/// when g provides them), dense sampling for ρ = ∞.
template <ScalarFunction G>
ModulusSample diff_norm(const G& g, double h, double rho, Interval window,
                        const DiffNormOptions& options = {}) {
  if (!(h > 0)) throw PreconditionViolation("diff_norm: h must be > 0");
  if (!(rho > 0)) throw PreconditionViolation("diff_norm: rho must be > 0");
  if (!(window.hi > window.lo)) throw PreconditionViolation("diff_norm: empty window");
  ModulusSample sample;
  sample.h = h;
  sample.rho = rho;
  if (std::isinf(rho)) {
    double best = 0.0;
    const long m = std::max<long>(options.sup_samples, 2);
    for (long i = 0; i <= m; ++i) {
      const double x = window.lo + window.length() * static_cast<double>(i) / m;
      best = std::max(best, std::abs(g(x + h) - g(x)));
    }
    for (double x : detail::panel_edges(g, h, window, 1)) {
      best = std::max(best, std::abs(g(x + h) - g(x)));
    }
    sample.value = best;
    sample.method = ModulusMethod::SupSampling;
    return sample;
  }
  const auto edges = detail::panel_edges(g, h, window, options.uniform_panels);
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    auto integrand = [&](double x, double, double) {
      return std::pow(std::abs(g(x + h) - g(x)), rho);
    };
    const PanelResult r = tanh_sinh_panel(integrand, edges[i], edges[i + 1], options.panel_tol);
    total += r.value;
    error += r.error;
  }
  if (error > options.accept_tol * total && error > 1e-300) {
    throw GridTooCoarse(error / std::max(total, 1e-300), options.accept_tol,
                        "diff_norm: panel error estimate above tolerance");
  }
  sample.value = std::pow(total, 1.0 / rho);
  sample.error_bound = total > 0 ? sample.value * error / (rho * total) : 0.0;
  sample.method = ModulusMethod::GridQuadrature;
  return sample;
}

}  // namespace pbesov
