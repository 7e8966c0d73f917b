#pragma once

// Exact evaluation of the one-dimensional bump train w_{σ,θ} and of the
// windowed profiles v_{σ,θ}, u_{σ,θ} built from it.
//
// Block n >= 2 occupies [a_n, a_{n+1}) with a_n = 4 Σ_{j<n} j^{-θ} and width
// c_n = n^{-θ}:
//
//   ramp-up   [a_n,        a_n + c_n)   (ξ - a_n)^σ
//   plateau   [a_n + c_n,  a_n + 2c_n)  n^{-θσ}
//   ramp-down [a_n + 2c_n, a_n + 3c_n)  (a_n + 3c_n - ξ)^σ
//   gap       [a_n + 3c_n, a_{n+1})     0
//
// Blocks are enumerated lazily up to n_cap; the tail [a_{n_cap}, 4ζ(θ)) is
// treated as zero with sup-error n_cap^{-θσ}.

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "pbesov/zeta.hpp"

namespace pbesov {

namespace detail {

/// values[n] = scale * Σ_{j=first}^{n-1} j^{-exponent} for 2 <= n <= cap,
/// filled on demand. Extension is serialized; reads of filled entries are
/// lock-free.
class LazyPowerPrefix {
 public:
  LazyPowerPrefix(double scale, double exponent, long first, long cap);
  LazyPowerPrefix(const LazyPowerPrefix&) = delete;
  LazyPowerPrefix& operator=(const LazyPowerPrefix&) = delete;

  double at(long n) const;
  /// Largest n in [2, cap] with values[n] <= x. Requires x >= values[2].
  long floor_index(double x) const;
  long cap() const noexcept { return cap_; }

 private:
  void extend_to(long n) const;

  double scale_;
  double exponent_;
  long first_;
  long cap_;
  std::unique_ptr<double[]> values_;
  mutable std::atomic<long> filled_;
  mutable std::mutex mutex_;
  mutable double sum_ = 0.0;
  mutable double comp_ = 0.0;
};

}  // namespace detail

/// Prefix sums W(a_n) = ∫_{-∞}^{a_n} w of the bump train.
class BlockMassTable {
 public:
  BlockMassTable(double sigma, double theta, long n_cap);

  /// W(a_n) for 2 <= n <= n_cap.
  double prefix_mass(long n) const { return prefix_.at(n); }
  /// (2/(σ+1) + 1) n^{-θ(σ+1)}.
  double block_mass(long n) const;
  /// (2/(σ+1) + 1)(ζ(θ(σ+1)) - 1), the mass of the untruncated train.
  double total_mass() const noexcept { return total_; }
  double total_mass_error() const noexcept { return total_error_; }

 private:
  double sigma_;
  double theta_;
  double factor_;
  detail::LazyPowerPrefix prefix_;
  double total_;
  double total_error_;
};

/// The seed (σ, θ) of the construction plus its derived constants.
class BumpParams {
 public:
  static constexpr long kDefaultBlockCap = 1'000'000;

  /// Throws DomainError unless σ > 0 and θ > 1.
  BumpParams(double sigma, double theta, long n_cap = kDefaultBlockCap);

  double sigma() const noexcept { return sigma_; }
  double theta() const noexcept { return theta_; }
  const ZetaValue& zeta_theta() const noexcept { return zeta_; }
  /// 4 ζ(θ), the accumulation point of the blocks.
  double a_inf() const noexcept { return 4 * zeta_.value; }
  long n_cap() const noexcept { return n_cap_; }
  /// n_cap^{-θσ}: sup of every discarded bump.
  double tail_height_bound() const noexcept { return tail_height_; }

  const BlockMassTable& mass_table() const noexcept { return *masses_; }
  const detail::LazyPowerPrefix& breakpoint_table() const noexcept { return *breakpoints_; }

  /// Same θ and block table, exponent replaced by `sigma`.
  BumpParams with_sigma(double sigma) const;

 private:
  BumpParams(double sigma, const BumpParams& other);

  double sigma_;
  double theta_;
  long n_cap_;
  ZetaValue zeta_;
  double tail_height_;
  std::shared_ptr<const detail::LazyPowerPrefix> breakpoints_;
  std::shared_ptr<const BlockMassTable> masses_;
};

enum class Phase { RampUp, Plateau, RampDown, Gap, OutsideLeft, OutsideRight };

const char* to_string(Phase phase) noexcept;

struct SegmentLocator {
  long block_index = 0;  ///< n >= 2 inside the support, 0 outside
  Phase phase = Phase::OutsideLeft;
  double local_offset = 0.0;  ///< ξ - a_n
  double block_width = 0.0;   ///< n^{-θ}
};

/// One analytic piece of w, valid on a half-open segment.
enum class PieceKind { Zero, Constant, RampUp, RampDown };

struct Piece {
  PieceKind kind = PieceKind::Zero;
  /// Ramp start a_n (RampUp) or ramp end a_n + 3c_n (RampDown).
  double anchor = 0.0;
  /// Plateau level n^{-θσ} (Constant).
  double height = 0.0;

  double operator()(double xi, double sigma) const;
};

/// Snap tolerance for transition points: |ξ - p| <= kSnapRelative·max(1,|ξ|).
inline constexpr double kSnapRelative = 1e-14;

double breakpoint(long n, const BumpParams& params);

/// Throws TruncationSaturated inside [a_{n_cap}, a_inf).
SegmentLocator locate(double xi, const BumpParams& params);
/// nullopt inside the truncated tail.
std::optional<SegmentLocator> try_locate(double xi, const BumpParams& params);

double eval_w(double xi, const BumpParams& params);
/// Throws NotDifferentiable within the snap tolerance of a transition point.
/// Returns 0 in the truncated tail.
double eval_w_prime(double xi, const BumpParams& params,
                    double snap_relative = kSnapRelative);
/// W(ξ) = ∫_{-∞}^ξ w.
double cumulative_w(double xi, const BumpParams& params);

Piece piece_at(double xi, const BumpParams& params);

/// Transition points a_n + k c_n (k = 0..3, n < n_cap) in [lo, hi], plus a_{n_cap}
/// and a_inf when they fall inside. Sorted ascending.
std::vector<double> transition_points(const BumpParams& params, double lo, double hi);

/// ‖w‖_{L_ρ(ℝ)} in closed form; rho = +inf allowed.
double w_lp_norm(double rho, const BumpParams& params);
/// ‖w'‖_{L_ρ(ℝ)} in closed form, or nullopt when the norm diverges.
std::optional<double> w_prime_lp_norm(double rho, const BumpParams& params);
/// Finiteness condition for ‖w'‖_{L_ρ}: σ >= 1, or (1-σ)/(1-1/θ) < 1/ρ.
/// Points within 1e-12 (relative) of the boundary count as divergent.
bool w_prime_in_lp(double rho, double sigma, double theta);

/// Argument pull-backs 4ζ(4r-1) and 4ζ(4r-2) used by v and u.
struct LobeArguments {
  double positive;
  double negative;
};
LobeArguments lobe_arguments(double r, const BumpParams& params);
/// Inverse maps t ↦ r of the two lobes.
double positive_lobe_radius(double t, const BumpParams& params);
double negative_lobe_radius(double t, const BumpParams& params);

double eval_v(double r, const BumpParams& params);
/// v'(r) = 16ζ(θ)[w'(t₊) - w'(t₋)]; throws NotDifferentiable at pull-backs of
/// transition points.
double eval_v_prime(double r, const BumpParams& params,
                    double snap_relative = kSnapRelative);
double eval_u(double r, const BumpParams& params);

}  // namespace pbesov
