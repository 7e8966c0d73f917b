#include "pbesov/bump.hpp"

#include <algorithm>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "pbesov/errors.hpp"

namespace pbesov {
namespace detail {

LazyPowerPrefix::LazyPowerPrefix(double scale, double exponent, long first, long cap)
    : scale_(scale),
      exponent_(exponent),
      first_(first),
      cap_(cap),
      values_(new double[static_cast<std::size_t>(cap) + 1]),
      filled_(1) {
  if (cap < 2) throw PreconditionViolation("block cap must be >= 2");
  if (first > 2) throw PreconditionViolation("prefix must start at index <= 2");
  // values[2] = scale * Σ_{j=first}^{1} j^{-exponent}
  for (long j = first; j < 2; ++j) sum_ += std::pow(static_cast<double>(j), -exponent_);
  values_[2] = scale_ * (sum_ + comp_);
  filled_.store(2, std::memory_order_release);
}

void LazyPowerPrefix::extend_to(long n) const {
  std::lock_guard<std::mutex> lock(mutex_);
  long filled = filled_.load(std::memory_order_relaxed);
  if (filled >= n) return;
  const long target = std::min(cap_, std::max(n, 2 * filled));
  for (long k = filled + 1; k <= target; ++k) {
    const double term = std::pow(static_cast<double>(k - 1), -exponent_);
    const double t = sum_ + term;
    comp_ += std::abs(sum_) >= term ? (sum_ - t) + term : (term - t) + sum_;
    sum_ = t;
    values_[k] = scale_ * (sum_ + comp_);
  }
  filled_.store(target, std::memory_order_release);
}

double LazyPowerPrefix::at(long n) const {
  if (n < 2 || n > cap_) throw PreconditionViolation("block index outside [2, n_cap]");
  if (filled_.load(std::memory_order_acquire) < n) extend_to(n);
  return values_[n];
}

long LazyPowerPrefix::floor_index(double x) const {
  long filled = filled_.load(std::memory_order_acquire);
  while (values_[filled] <= x && filled < cap_) {
    extend_to(std::min(cap_, 2 * filled));
    filled = filled_.load(std::memory_order_acquire);
  }
  const double* begin = values_.get() + 2;
  const double* end = values_.get() + filled + 1;
  const double* it = std::upper_bound(begin, end, x);
  return static_cast<long>(it - values_.get()) - 1;
}

}  // namespace detail

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ζ(s) - 1 with relative accuracy about 1e-14. Below s = 2 the certified sum
// needs up to ~10^6 terms and ζ(s) - 1 > 0.6 has no cancellation, so Boost's
// ζ is used there.
double zeta_minus_one(double s) {
  if (s < 2) return boost::math::zeta(s) - 1;
  const double magnitude = std::pow(2.0, -s) + std::pow(2.0, 1 - s) / (s - 1);
  return zeta_tail(s, 2, 1e-14 * magnitude).value;
}

double zeta_tolerance(double theta) {
  const double magnitude = 1.0 + 1.0 / (theta - 1);
  return 1e-14 * magnitude;
}

double block_width(long n, double theta) { return std::pow(static_cast<double>(n), -theta); }

}  // namespace

BlockMassTable::BlockMassTable(double sigma, double theta, long n_cap)
    : sigma_(sigma),
      theta_(theta),
      factor_(2.0 / (sigma + 1) + 1.0),
      prefix_(2.0 / (sigma + 1) + 1.0, theta * (sigma + 1), 2, n_cap) {
  const double s = theta * (sigma + 1);
  const double magnitude = std::pow(2.0, -s) + std::pow(2.0, 1 - s) / (s - 1);
  const ZetaValue z = zeta_tail(s, 2, 1e-14 * magnitude);
  total_ = factor_ * z.value;
  total_error_ = factor_ * z.error_bound;
}

double BlockMassTable::block_mass(long n) const {
  return factor_ * std::pow(static_cast<double>(n), -theta_ * (sigma_ + 1));
}

BumpParams::BumpParams(double sigma, double theta, long n_cap)
    : sigma_(sigma), theta_(theta), n_cap_(n_cap) {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw DomainError("bump: sigma must be > 0");
  if (!(theta > 1) || !std::isfinite(theta)) throw DomainError("bump: theta must be > 1");
  if (n_cap < 3) throw PreconditionViolation("bump: n_cap must be >= 3");
  zeta_ = zeta(theta, zeta_tolerance(theta));
  tail_height_ = std::pow(static_cast<double>(n_cap), -theta * sigma);
  breakpoints_ = std::make_shared<detail::LazyPowerPrefix>(4.0, theta, 1, n_cap);
  masses_ = std::make_shared<BlockMassTable>(sigma, theta, n_cap);
}

BumpParams::BumpParams(double sigma, const BumpParams& other)
    : sigma_(sigma),
      theta_(other.theta_),
      n_cap_(other.n_cap_),
      zeta_(other.zeta_),
      breakpoints_(other.breakpoints_) {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw DomainError("bump: sigma must be > 0");
  tail_height_ = std::pow(static_cast<double>(n_cap_), -theta_ * sigma);
  masses_ = std::make_shared<BlockMassTable>(sigma, theta_, n_cap_);
}

BumpParams BumpParams::with_sigma(double sigma) const { return BumpParams(sigma, *this); }

const char* to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::RampUp: return "ramp-up";
    case Phase::Plateau: return "plateau";
    case Phase::RampDown: return "ramp-down";
    case Phase::Gap: return "gap";
    case Phase::OutsideLeft: return "outside-left";
    case Phase::OutsideRight: return "outside-right";
  }
  return "?";
}

double Piece::operator()(double xi, double sigma) const {
  switch (kind) {
    case PieceKind::Zero: return 0.0;
    case PieceKind::Constant: return height;
    case PieceKind::RampUp: return std::pow(std::max(0.0, xi - anchor), sigma);
    case PieceKind::RampDown: return std::pow(std::max(0.0, anchor - xi), sigma);
  }
  return 0.0;
}

double breakpoint(long n, const BumpParams& params) {
  return params.breakpoint_table().at(n);
}

std::optional<SegmentLocator> try_locate(double xi, const BumpParams& params) {
  SegmentLocator loc;
  if (!(xi >= 4.0)) {
    loc.phase = Phase::OutsideLeft;
    return loc;
  }
  if (xi >= params.a_inf()) {
    loc.phase = Phase::OutsideRight;
    return loc;
  }
  const auto& table = params.breakpoint_table();
  const long n = table.floor_index(xi);
  if (n >= params.n_cap()) return std::nullopt;
  const double c = block_width(n, params.theta());
  const double offset = xi - table.at(n);
  loc.block_index = n;
  loc.local_offset = offset;
  loc.block_width = c;
  if (offset < c) {
    loc.phase = Phase::RampUp;
  } else if (offset < 2 * c) {
    loc.phase = Phase::Plateau;
  } else if (offset < 3 * c) {
    loc.phase = Phase::RampDown;
  } else {
    loc.phase = Phase::Gap;
  }
  return loc;
}

SegmentLocator locate(double xi, const BumpParams& params) {
  auto loc = try_locate(xi, params);
  if (!loc) {
    throw TruncationSaturated(xi, params.tail_height_bound(),
                              "point lies in the truncated tail of the bump train");
  }
  return *loc;
}

double eval_w(double xi, const BumpParams& params) {
  const auto loc = try_locate(xi, params);
  if (!loc) return 0.0;
  const double sigma = params.sigma();
  switch (loc->phase) {
    case Phase::RampUp: return std::pow(loc->local_offset, sigma);
    case Phase::Plateau:
      return std::pow(static_cast<double>(loc->block_index), -params.theta() * sigma);
    case Phase::RampDown:
      return std::pow(std::max(0.0, 3 * loc->block_width - loc->local_offset), sigma);
    default: return 0.0;
  }
}

double eval_w_prime(double xi, const BumpParams& params, double snap_relative) {
  const double snap = snap_relative * std::max(1.0, std::abs(xi));
  auto fail = [&](double point) -> double {
    throw NotDifferentiable(point, "w is not differentiable at a transition point");
  };
  if (std::abs(xi - 4.0) <= snap) return fail(4.0);
  if (std::abs(xi - params.a_inf()) <= snap) return fail(params.a_inf());
  const auto loc = try_locate(xi, params);
  if (!loc) return 0.0;
  if (loc->phase == Phase::OutsideLeft || loc->phase == Phase::OutsideRight) return 0.0;

  const long n = loc->block_index;
  const double a = breakpoint(n, params);
  const double c = loc->block_width;
  for (int k = 0; k <= 3; ++k) {
    const double p = a + k * c;
    if (std::abs(xi - p) <= snap) return fail(p);
  }
  if (n + 1 <= params.n_cap()) {
    const double next = breakpoint(n + 1, params);
    if (std::abs(xi - next) <= snap) return fail(next);
  }

  const double sigma = params.sigma();
  switch (loc->phase) {
    case Phase::RampUp: return sigma * std::pow(loc->local_offset, sigma - 1);
    case Phase::RampDown:
      return -sigma * std::pow(3 * c - loc->local_offset, sigma - 1);
    default: return 0.0;
  }
}

double cumulative_w(double xi, const BumpParams& params) {
  const auto& masses = params.mass_table();
  if (!(xi > 4.0)) return 0.0;
  if (xi >= params.a_inf()) return masses.total_mass();
  const auto loc = try_locate(xi, params);
  if (!loc) return masses.prefix_mass(params.n_cap());

  const long n = loc->block_index;
  const double s1 = params.sigma() + 1;
  const double c = loc->block_width;
  const double full = std::pow(static_cast<double>(n), -params.theta() * s1);  // c^{σ+1}
  const double x = loc->local_offset;
  double partial = 0.0;
  switch (loc->phase) {
    case Phase::RampUp: partial = std::pow(x, s1) / s1; break;
    case Phase::Plateau:
      partial = full / s1 +
                std::pow(static_cast<double>(n), -params.theta() * params.sigma()) * (x - c);
      break;
    case Phase::RampDown:
      partial = full / s1 + full + (full - std::pow(std::max(0.0, 3 * c - x), s1)) / s1;
      break;
    default: partial = masses.block_mass(n); break;
  }
  return masses.prefix_mass(n) + partial;
}

Piece piece_at(double xi, const BumpParams& params) {
  Piece piece;
  const auto loc = try_locate(xi, params);
  if (!loc) return piece;
  const long n = loc->block_index;
  switch (loc->phase) {
    case Phase::RampUp:
      piece.kind = PieceKind::RampUp;
      piece.anchor = breakpoint(n, params);
      break;
    case Phase::Plateau:
      piece.kind = PieceKind::Constant;
      piece.height =
          std::pow(static_cast<double>(n), -params.theta() * params.sigma());
      break;
    case Phase::RampDown:
      piece.kind = PieceKind::RampDown;
      piece.anchor = breakpoint(n, params) + 3 * loc->block_width;
      break;
    default: break;
  }
  return piece;
}

std::vector<double> transition_points(const BumpParams& params, double lo, double hi) {
  std::vector<double> out;
  if (!(hi >= lo)) return out;
  const auto& table = params.breakpoint_table();
  const long cap = params.n_cap();
  long n = lo <= 4.0 ? 2 : table.floor_index(lo);
  for (; n < cap; ++n) {
    const double a = table.at(n);
    if (a > hi) break;
    const double c = block_width(n, params.theta());
    for (int k = 0; k <= 3; ++k) {
      const double p = a + k * c;
      if (p >= lo && p <= hi) out.push_back(p);
    }
  }
  if (n >= cap) {
    const double a_cap = table.at(cap);
    if (a_cap >= lo && a_cap <= hi) out.push_back(a_cap);
  }
  if (params.a_inf() >= lo && params.a_inf() <= hi) out.push_back(params.a_inf());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double w_lp_norm(double rho, const BumpParams& params) {
  if (!(rho > 0)) throw DomainError("w_lp_norm: rho must be > 0");
  const double sigma = params.sigma();
  const double theta = params.theta();
  if (std::isinf(rho)) return std::pow(2.0, -sigma * theta);
  const double e = sigma * rho + 1;
  return std::pow((2.0 / e + 1.0) * zeta_minus_one(theta * e), 1.0 / rho);
}

bool w_prime_in_lp(double rho, double sigma, double theta) {
  if (sigma >= 1) return true;
  if (std::isinf(rho)) return false;
  const double lhs = (1 - sigma) / (1 - 1 / theta);
  const double inv = 1 / rho;
  return lhs < inv - 1e-12 * std::max(1.0, inv);
}

std::optional<double> w_prime_lp_norm(double rho, const BumpParams& params) {
  if (!(rho > 0)) throw DomainError("w_prime_lp_norm: rho must be > 0");
  const double sigma = params.sigma();
  const double theta = params.theta();
  if (!w_prime_in_lp(rho, sigma, theta)) return std::nullopt;
  if (std::isinf(rho)) {
    // sup over ramps of σ x^{σ-1}, attained on the first block
    return sigma * std::pow(2.0, -theta * (sigma - 1));
  }
  const double e = 1 + (sigma - 1) * rho;
  const double value = 2 * std::pow(sigma, rho) / e * zeta_minus_one(theta * e);
  return std::pow(value, 1.0 / rho);
}

LobeArguments lobe_arguments(double r, const BumpParams& params) {
  const double four_zeta = 4 * params.zeta_theta().value;
  return {four_zeta * (4 * r - 1), four_zeta * (4 * r - 2)};
}

double positive_lobe_radius(double t, const BumpParams& params) {
  return (t / (4 * params.zeta_theta().value) + 1) / 4;
}

double negative_lobe_radius(double t, const BumpParams& params) {
  return (t / (4 * params.zeta_theta().value) + 2) / 4;
}

double eval_v(double r, const BumpParams& params) {
  const auto t = lobe_arguments(r, params);
  return eval_w(t.positive, params) - eval_w(t.negative, params);
}

double eval_v_prime(double r, const BumpParams& params, double snap_relative) {
  const auto t = lobe_arguments(r, params);
  const double scale = 16 * params.zeta_theta().value;
  try {
    return scale * (eval_w_prime(t.positive, params, snap_relative) -
                    eval_w_prime(t.negative, params, snap_relative));
  } catch (const NotDifferentiable&) {
    throw NotDifferentiable(r, "v is not differentiable at r = " + std::to_string(r));
  }
}

double eval_u(double r, const BumpParams& params) {
  const auto t = lobe_arguments(r, params);
  const double scale = 16 * params.zeta_theta().value;
  return (cumulative_w(t.positive, params) - cumulative_w(t.negative, params)) / scale;
}

}  // namespace pbesov
