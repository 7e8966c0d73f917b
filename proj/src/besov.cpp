#include "pbesov/besov.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace pbesov {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Walks the pieces of w(· + shift) left to right, in x coordinates.
class SegmentCursor {
 public:
  SegmentCursor(const BumpParams& params, double shift, double x0)
      : params_(params), table_(params.breakpoint_table()), shift_(shift) {
    const double xi = x0 + shift;
    if (xi < 4.0) {
      set_left();
    } else if (xi >= params.a_inf()) {
      set_right();
    } else if (auto loc = try_locate(xi, params)) {
      set_block(loc->block_index, static_cast<int>(loc->phase));
    } else {
      set_tail();
    }
  }

  double end() const noexcept { return end_; }
  const Piece& piece() const noexcept { return piece_; }

  void advance() {
    switch (state_) {
      case State::Left: set_block(2, 0); break;
      case State::Block:
        if (k_ < 3) {
          set_block(n_, k_ + 1);
        } else if (n_ + 1 < params_.n_cap()) {
          set_block(n_ + 1, 0);
        } else {
          set_tail();
        }
        break;
      case State::Tail: set_right(); break;
      case State::Right: break;
    }
  }

 private:
  enum class State { Left, Block, Tail, Right };

  void set_left() {
    state_ = State::Left;
    end_ = 4.0 - shift_;
    piece_ = Piece{};
  }
  void set_right() {
    state_ = State::Right;
    end_ = kInf;
    piece_ = Piece{};
  }
  void set_tail() {
    state_ = State::Tail;
    end_ = params_.a_inf() - shift_;
    piece_ = Piece{};
  }
  void set_block(long n, int k) {
    state_ = State::Block;
    n_ = n;
    k_ = k;
    const double a = table_.at(n);
    const double c = std::pow(static_cast<double>(n), -params_.theta());
    end_ = (k < 3 ? a + (k + 1) * c : table_.at(n + 1)) - shift_;
    piece_ = Piece{};
    switch (k) {
      case 0:
        piece_.kind = PieceKind::RampUp;
        piece_.anchor = a - shift_;
        break;
      case 1:
        piece_.kind = PieceKind::Constant;
        piece_.height = std::pow(static_cast<double>(n), -params_.theta() * params_.sigma());
        break;
      case 2:
        piece_.kind = PieceKind::RampDown;
        piece_.anchor = a + 3 * c - shift_;
        break;
      default: break;
    }
  }

  const BumpParams& params_;
  const detail::LazyPowerPrefix& table_;
  double shift_;
  State state_ = State::Left;
  long n_ = 0;
  int k_ = 0;
  double end_ = 0.0;
  Piece piece_;
};


// Point where two pieces (x coordinates) take equal values, if any.
std::optional<double> crossing(const Piece& a, const Piece& b, double sigma) {
  if (a.kind == PieceKind::Zero || b.kind == PieceKind::Zero) return std::nullopt;
  if (a.kind == b.kind) return std::nullopt;
  if (b.kind == PieceKind::Constant) return crossing(b, a, sigma);
  if (a.kind == PieceKind::Constant) {
    const double d = std::pow(a.height, 1.0 / sigma);
    return b.kind == PieceKind::RampUp ? b.anchor + d : b.anchor - d;
  }
  // one ramp-up, one ramp-down
  return 0.5 * (a.anchor + b.anchor);
}

// Value of a piece at x = l + dl = r - dr using whichever end is closer.
struct LocalPiece {
  PieceKind kind;
  double arg_l;
  double arg_r;
  double height;

  LocalPiece(const Piece& p, double l, double r) : kind(p.kind), arg_l(0), arg_r(0), height(p.height) {
    if (p.kind == PieceKind::RampUp) {
      arg_l = l - p.anchor;
      arg_r = r - p.anchor;
    } else if (p.kind == PieceKind::RampDown) {
      arg_l = p.anchor - l;
      arg_r = p.anchor - r;
    }
  }

  double operator()(double dl, double dr, double sigma) const {
    double arg;
    switch (kind) {
      case PieceKind::Zero: return 0.0;
      case PieceKind::Constant: return height;
      case PieceKind::RampUp: arg = dl <= dr ? arg_l + dl : arg_r - dr; break;
      case PieceKind::RampDown: arg = dl <= dr ? arg_l - dl : arg_r + dr; break;
      default: return 0.0;
    }
    return std::pow(std::max(0.0, arg), sigma);
  }

  // ∫ over the panel of |piece|^ρ.
  double power_integral(double rho, double sigma, double len) const {
    const double e = sigma * rho + 1;
    const double l = std::max(0.0, arg_l);
    const double r = std::max(0.0, arg_r);
    switch (kind) {
      case PieceKind::Zero: return 0.0;
      case PieceKind::Constant: return std::pow(height, rho) * len;
      case PieceKind::RampUp: return (std::pow(r, e) - std::pow(l, e)) / e;
      case PieceKind::RampDown: return (std::pow(l, e) - std::pow(r, e)) / e;
    }
    return 0.0;
  }
};

// |d|^ρ, multiplying out the even integer exponents of the default runs.
double abs_power(double d, double rho) {
  if (rho == 2.0) return d * d;
  if (rho == 4.0) {
    const double d2 = d * d;
    return d2 * d2;
  }
  return std::pow(std::abs(d), rho);
}

struct Accumulator {
  double total = 0.0;
  double error = 0.0;
  bool used_quadrature = false;
};

void integrate_subpanel(const Piece& a, const Piece& b, double l, double r, double rho,
                        double sigma, const DiffNormOptions& options, double budget,
                        Accumulator& acc) {
  if (!(r > l)) return;
  const LocalPiece pa(a, l, r);
  const LocalPiece pb(b, l, r);
  const double len = r - l;
  if (a.kind == PieceKind::Constant && b.kind == PieceKind::Constant) {
    acc.total += std::pow(std::abs(a.height - b.height), rho) * len;
    return;
  }
  if (options.closed_form_single_piece) {
    if (rho == 1.0 && a.kind != PieceKind::Zero && b.kind != PieceKind::Zero) {
      // A - B keeps its sign between crossings
      acc.total += std::abs(pa.power_integral(1.0, sigma, len) - pb.power_integral(1.0, sigma, len));
      return;
    }
    if (rho == 2.0 && (a.kind == PieceKind::Constant || b.kind == PieceKind::Constant)) {
      const LocalPiece& c = a.kind == PieceKind::Constant ? pa : pb;
      const LocalPiece& o = a.kind == PieceKind::Constant ? pb : pa;
      acc.total += std::max(0.0, c.height * c.height * len -
                                     2 * c.height * o.power_integral(1.0, sigma, len) +
                                     o.power_integral(2.0, sigma, len));
      return;
    }
    if (a.kind == PieceKind::Zero) {
      acc.total += pb.power_integral(rho, sigma, len);
      return;
    }
    if (b.kind == PieceKind::Zero) {
      acc.total += pa.power_integral(rho, sigma, len);
      return;
    }
  }
  auto integrand = [&](double, double dl, double dr) {
    return abs_power(pb(dl, dr, sigma) - pa(dl, dr, sigma), rho);
  };
  PanelResult res = de_panel_tiered(integrand, l, r, options.fixed_rule_tol, budget);
  if (!(res.error <= std::max(options.fixed_rule_tol * std::abs(res.value), budget) + 1e-300)) {
    res = tanh_sinh_panel(integrand, l, r, options.panel_tol);
  }
  acc.total += res.value;
  acc.error += res.error;
  acc.used_quadrature = true;
}

double piece_value(const Piece& p, double x, double sigma) { return p(x, sigma); }

// Hölder (or Lipschitz) constant and exponent of w.
std::pair<double, double> holder_data(const BumpParams& params) {
  const double sigma = params.sigma();
  if (sigma < 1) return {2.0, sigma};
  return {sigma * std::pow(2.0, -params.theta() * (sigma - 1)), 1.0};
}

}  // namespace

const char* to_string(ModulusMethod method) noexcept {
  switch (method) {
    case ModulusMethod::ClosedForm: return "ClosedForm";
    case ModulusMethod::GridQuadrature: return "GridQuadrature";
    case ModulusMethod::SupSampling: return "SupSampling";
  }
  return "?";
}

BlockCounter BlockCounter::of(double h, double theta) {
  if (!(h > 0)) throw PreconditionViolation("BlockCounter: h must be > 0");
  return BlockCounter{static_cast<long>(std::ceil(std::pow(h, -1.0 / theta) / 3.0))};
}

double max_admissible_step(double theta) { return std::pow(1.0 / 6.0, theta); }

Interval support_window(const BumpParams& params, double h) {
  return Interval{4.0 - h, params.a_inf()};
}

Interval gap_window(long n, const BumpParams& params) {
  if (n < 2 || n + 1 > params.n_cap()) throw PreconditionViolation("gap_window: n out of range");
  const double a = breakpoint(n, params);
  const double c = std::pow(static_cast<double>(n), -params.theta());
  return Interval{a + 3 * c, breakpoint(n + 1, params)};
}

ModulusSample diff_norm(const BumpTrain& w, double h, double rho, Interval window,
                        const DiffNormOptions& options) {
  if (!(h > 0)) throw PreconditionViolation("diff_norm: h must be > 0");
  if (!(rho > 0)) throw PreconditionViolation("diff_norm: rho must be > 0");
  if (!(window.hi > window.lo)) throw PreconditionViolation("diff_norm: empty window");
  const BumpParams& params = w.params();
  const double sigma = params.sigma();

  ModulusSample sample;
  sample.h = h;
  sample.rho = rho;

  SegmentCursor base(params, 0.0, window.lo);
  SegmentCursor shifted(params, h, window.lo);
  const bool sup = std::isinf(rho);
  Accumulator acc;
  double budget = 0.0;
  if (!sup) {
    // exact contribution of the gaps R_n that lie inside the window
    const long last = std::min(BlockCounter::of(h, params.theta()).N_h, params.n_cap() - 1);
    for (long n = 2; n <= last; ++n) {
      const Interval gap = gap_window(n, params);
      if (gap.lo >= window.lo && gap.hi <= window.hi) {
        budget += exact_gap_diff(n, h, rho, params);
      }
    }
    budget *= options.panel_budget;
  }
  double best = 0.0;

  double x = window.lo;
  while (x < window.hi) {
    const double r = std::min({base.end(), shifted.end(), window.hi});
    if (r > x) {
      const Piece& a = base.piece();
      const Piece& b = shifted.piece();
      if (sup) {
        best = std::max({best, std::abs(piece_value(b, x, sigma) - piece_value(a, x, sigma)),
                         std::abs(piece_value(b, r, sigma) - piece_value(a, r, sigma))});
      } else if (a.kind != PieceKind::Zero || b.kind != PieceKind::Zero) {
        const auto cut = crossing(a, b, sigma);
        if (cut && *cut > x && *cut < r) {
          integrate_subpanel(a, b, x, *cut, rho, sigma, options, budget, acc);
          integrate_subpanel(a, b, *cut, r, rho, sigma, options, budget, acc);
        } else {
          integrate_subpanel(a, b, x, r, rho, sigma, options, budget, acc);
        }
      }
      x = r;
    }
    while (base.end() <= x) base.advance();
    while (shifted.end() <= x) shifted.advance();
  }

  if (sup) {
    // Dense cross-check: every grid point is within δ/2 of a point of the
    // window, and Δ_h w moves by at most 2C(δ/2)^α over that distance.
    const long m = std::max<long>(options.sup_samples, 2);
    const double delta = window.length() / static_cast<double>(m);
    double dense = 0.0;
    for (long i = 0; i <= m; ++i) {
      const double xi = window.lo + delta * static_cast<double>(i);
      dense = std::max(dense, std::abs(w(xi + h) - w(xi)));
    }
    const auto [constant, alpha] = holder_data(params);
    const double radius = 2 * constant * std::pow(delta / 2, alpha);
    const double slack = 1e-13 + 2 * params.tail_height_bound();
    if (dense > best + slack || best > dense + radius + slack) {
      throw GridTooCoarse(std::abs(dense - best), radius,
                          "diff_norm: structured sup disagrees with dense sampling");
    }
    sample.value = best;
    sample.error_bound = radius;
    sample.method = ModulusMethod::SupSampling;
    return sample;
  }

  if (acc.error > options.accept_tol * acc.total && acc.error > 1e-300) {
    throw GridTooCoarse(acc.error / std::max(acc.total, 1e-300), options.accept_tol,
                        "diff_norm: panel error estimate above tolerance");
  }
  sample.value = std::pow(acc.total, 1.0 / rho);
  sample.error_bound = acc.total > 0 ? sample.value * acc.error / (rho * acc.total) : 0.0;
  sample.method = acc.used_quadrature ? ModulusMethod::GridQuadrature : ModulusMethod::ClosedForm;
  return sample;
}

double exact_gap_diff(long n, double h, double rho, const BumpParams& params) {
  if (n < 2) throw PreconditionViolation("exact_gap_diff: n must be >= 2");
  if (!(h > 0)) throw PreconditionViolation("exact_gap_diff: h must be > 0");
  if (!(rho > 0) || std::isinf(rho)) throw PreconditionViolation("exact_gap_diff: need 0 < rho < inf");
  if (h > std::pow(static_cast<double>(n + 1), -params.theta())) {
    throw PreconditionViolation("exact_gap_diff: h exceeds (n+1)^{-theta}");
  }
  const double e = params.sigma() * rho + 1;
  return std::pow(h, e) / e;
}

double gap_lower_bound(double h, double rho, const BumpParams& params) {
  const long count = BlockCounter::of(h, params.theta()).N_h;
  if (count < 2) return 0.0;
  return static_cast<double>(count - 1) * exact_gap_diff(count, h, rho, params);
}

bool in_validity_region(double rho, double sigma, double theta) {
  if (!(sigma > 0) || !(sigma < 1 / theta)) return false;
  const double inv = 1 / rho;
  return inv < std::min(theta * (1 + sigma), (1 - sigma) / (1 - 1 / theta));
}

double predicted_exponent(double rho, double sigma, double theta) {
  if (!(rho > 0)) throw PreconditionViolation("predicted_exponent: rho must be > 0");
  const double s = sigma + (1 - 1 / theta) / rho;
  if (!in_validity_region(rho, sigma, theta)) {
    throw OutOfValidity(s, "predicted_exponent: parameters outside the proven region");
  }
  return s;
}

double predicted_exponent(double rho, const BumpParams& params) {
  return predicted_exponent(rho, params.sigma(), params.theta());
}

ExponentFit fit_exponent(const std::vector<ModulusSample>& samples) {
  if (samples.size() < 6) throw InsufficientSamples("fit_exponent: need at least 6 samples");
  const auto m = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd target(m);
  ExponentFit fit;
  fit.h_range = {kInf, 0.0};
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    if (!(s.h > 0) || !(s.value > 0)) {
      throw InsufficientSamples("fit_exponent: samples need positive h and value");
    }
    design(i, 0) = std::log(s.h);
    design(i, 1) = 1.0;
    target(i) = std::log(s.value);
    fit.h_range.first = std::min(fit.h_range.first, s.h);
    fit.h_range.second = std::max(fit.h_range.second, s.h);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(target);
  fit.slope = coef(0);
  fit.intercept = coef(1);
  fit.residual = (design * coef - target).cwiseAbs().maxCoeff();
  fit.sample_count = static_cast<int>(m);
  return fit;
}

std::vector<double> dyadic_steps(double theta, int j_max, int j_min) {
  const int first = std::max(j_min, static_cast<int>(std::ceil(theta * std::log2(6.0) - 1e-12)));
  std::vector<double> steps;
  for (int j = first; j <= j_max; ++j) steps.push_back(std::ldexp(1.0, -j));
  return steps;
}

std::vector<ModulusSample> modulus_sweep(const BumpTrain& w, double rho,
                                         const std::vector<double>& steps,
                                         const DiffNormOptions& options) {
  std::vector<ModulusSample> out(steps.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < steps.size(); i = next++) {
      try {
        const double h = steps[i];
        out[i] = diff_norm(w, h, rho, support_window(w.params(), h), options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned count =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(steps.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<ModulusSample>& samples) {
  out << "h,rho,value,method\n";
  for (const auto& s : samples) {
    out << format_double(s.h) << ',' << format_double(s.rho) << ',' << format_double(s.value)
        << ',' << to_string(s.method) << '\n';
  }
}

}  // namespace pbesov
