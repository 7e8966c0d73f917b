#include "pbesov/radial.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <limits>

namespace pbesov {
namespace {

constexpr double kTwoPi = boost::math::constants::two_pi<double>();

double lobe_radius(double t, int lobe, const BumpParams& bump) {
  return lobe > 0 ? positive_lobe_radius(t, bump) : negative_lobe_radius(t, bump);
}

void push_ramp(std::vector<RadialNode>& out, double r0, double r1, long n, int lobe, Phase phase,
               int pieces) {
  const DoubleExponentialRule& rule = double_exponential_rule();
  const double len = r1 - r0;
  for (int j = 0; j < pieces; ++j) {
    const double lo = r0 + len * j / pieces;
    const double hi = j + 1 == pieces ? r1 : r0 + len * (j + 1) / pieces;
    const double sub = hi - lo;
    const double before = len * j / pieces;
    const double after = len * (pieces - j - 1) / pieces;
    for (std::size_t i = 0; i < rule.weight.size(); ++i) {
      RadialNode node;
      const double dl = sub * rule.left[i];
      const double dr = sub * rule.right[i];
      node.r = dl <= dr ? lo + dl : hi - dr;
      node.weight = sub * rule.weight[i];
      node.block = n;
      node.lobe = lobe;
      node.phase = phase;
      node.dist_left = before + dl;
      node.dist_right = after + dr;
      out.push_back(node);
    }
  }
}

void push_gauss(std::vector<RadialNode>& out, double a, double b, int order, long n, int lobe,
                Phase phase) {
  const GaussRule& rule = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int i = 0; i < order; ++i) {
    RadialNode node;
    node.r = mid + half * rule.nodes[i];
    node.weight = half * rule.weights[i];
    node.block = n;
    node.lobe = lobe;
    node.phase = phase;
    node.dist_left = node.r - a;
    node.dist_right = b - node.r;
    out.push_back(node);
  }
}

std::vector<AngularNode> angular_rule(int d, int order) {
  std::vector<AngularNode> out;
  if (d == 1) {
    out.push_back({Eigen::Vector3d(1, 0, 0), 1.0});
    out.push_back({Eigen::Vector3d(-1, 0, 0), 1.0});
    return out;
  }
  const GaussRule& phi_rule = gauss_legendre(d == 2 ? order : 2 * order);
  const auto phi_count = static_cast<int>(phi_rule.nodes.size());
  if (d == 2) {
    for (int i = 0; i < phi_count; ++i) {
      const double phi = kTwoPi * 0.5 * (phi_rule.nodes[i] + 1);
      out.push_back({Eigen::Vector3d(std::cos(phi), std::sin(phi), 0),
                     kTwoPi * 0.5 * phi_rule.weights[i]});
    }
    return out;
  }
  const GaussRule& z_rule = gauss_legendre(order);
  for (int k = 0; k < order; ++k) {
    const double z = z_rule.nodes[k];
    const double s = std::sqrt(1 - z * z);
    for (int i = 0; i < phi_count; ++i) {
      const double phi = kTwoPi * 0.5 * (phi_rule.nodes[i] + 1);
      out.push_back({Eigen::Vector3d(s * std::cos(phi), s * std::sin(phi), z),
                     z_rule.weights[k] * kTwoPi * 0.5 * phi_rule.weights[i]});
    }
  }
  return out;
}

// Smooth step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t, double* derivative) {
  if (t <= 0 || t >= 1) {
    *derivative = 0.0;
    return t <= 0 ? 0.0 : 1.0;
  }
  const double f = std::exp(-1 / t);
  const double g = std::exp(-1 / (1 - t));
  const double df = f / (t * t);
  const double dg = g / ((1 - t) * (1 - t));  // derivative of g(1-t) w.r.t. (1-t)
  const double denom = f + g;
  *derivative = (df * g + f * dg) / (denom * denom);
  return f / denom;
}

}  // namespace

RadialFieldSpec make_radial_field(const BumpParams& bump, double p, int d) {
  if (!(p >= 2) || !std::isfinite(p)) throw DomainError("radial field: need p >= 2");
  if (d < 1) throw DomainError("radial field: need d >= 1");
  BumpParams dual = p == 2 ? bump : bump.with_sigma((p - 1) * bump.sigma());
  return RadialFieldSpec{bump, p, d, std::move(dual)};
}

double eval_f_strong(double r, const RadialFieldSpec& spec) {
  if (!(r > 0)) throw PreconditionViolation("eval_f_strong: need r > 0");
  const double v = eval_v(r, spec.dual_bump);
  const double dv = eval_v_prime(r, spec.dual_bump);
  return -dv - v * (spec.d - 1) / r;
}

double sphere_area(int d) {
  if (d < 1) throw DomainError("sphere_area: need d >= 1");
  const double half = 0.5 * d;
  return 2 * std::pow(boost::math::constants::pi<double>(), half) / std::tgamma(half);
}

template <int Dim>
TestFunction<Dim> bump_test_function(double radius, const Eigen::Matrix<int, Dim, 1>& alpha) {
  using Vec = typename TestFunction<Dim>::Vec;
  TestFunction<Dim> psi;
  psi.support_radius = radius;
  psi.name = "bump R=" + std::to_string(radius).substr(0, 4) + " alpha=";
  for (int i = 0; i < Dim; ++i) psi.name += std::to_string(alpha[i]);
  auto monomial = [alpha](const Vec& x) {
    double m = 1.0;
    for (int i = 0; i < Dim; ++i) m *= std::pow(x[i], alpha[i]);
    return m;
  };
  psi.value = [radius, monomial](const Vec& x) {
    const double s = x.squaredNorm() / (radius * radius);
    if (s >= 1) return 0.0;
    return std::exp(-1 / (1 - s)) * monomial(x);
  };
  psi.gradient = [radius, alpha, monomial](const Vec& x) -> Vec {
    const double s = x.squaredNorm() / (radius * radius);
    if (s >= 1) return Vec::Zero();
    const double e = std::exp(-1 / (1 - s));
    Vec grad = (-e / ((1 - s) * (1 - s)) * 2 / (radius * radius) * monomial(x)) * x;
    for (int i = 0; i < Dim; ++i) {
      if (alpha[i] == 0) continue;
      double m = alpha[i] * std::pow(x[i], alpha[i] - 1);
      for (int j = 0; j < Dim; ++j) {
        if (j != i) m *= std::pow(x[j], alpha[j]);
      }
      grad[i] += e * m;
    }
    return grad;
  };
  return psi;
}

template <int Dim>
TestFunction<Dim> plateau_test_function(double inner, double outer) {
  using Vec = typename TestFunction<Dim>::Vec;
  TestFunction<Dim> psi;
  psi.name = "plateau";
  psi.support_radius = outer;
  const double width = outer - inner;
  psi.value = [outer, width](const Vec& x) {
    double ds;
    return smooth_step((outer - x.norm()) / width, &ds);
  };
  psi.gradient = [outer, width](const Vec& x) -> Vec {
    const double r = x.norm();
    double ds;
    smooth_step((outer - r) / width, &ds);
    if (ds == 0.0 || r == 0.0) return Vec::Zero();
    return (-ds / width / r) * x;
  };
  return psi;
}

template <int Dim>
std::vector<TestFunction<Dim>> test_function_suite() {
  using Alpha = Eigen::Matrix<int, Dim, 1>;
  auto alpha = [](int a0, int a1) {
    Alpha a = Alpha::Zero();
    if (Dim == 1) {
      a[0] = a0 + a1;
    } else {
      a[0] = a0;
      a[1] = a1;
    }
    return a;
  };
  std::vector<TestFunction<Dim>> out;
  out.push_back(bump_test_function<Dim>(0.85, alpha(0, 0)));
  out.push_back(bump_test_function<Dim>(1.0, alpha(0, 0)));
  out.push_back(bump_test_function<Dim>(0.85, alpha(2, 0)));
  out.push_back(bump_test_function<Dim>(1.0, alpha(0, 2)));
  // odd in x_1: both sides of the weak identity vanish by symmetry
  out.push_back(bump_test_function<Dim>(0.85, alpha(3, 0)));
  out.push_back(plateau_test_function<Dim>());
  return out;
}

template <int Dim>
double w1_inf_norm(const TestFunction<Dim>& psi, int samples) {
  const auto dirs = angular_rule(Dim, 16);
  double sup_value = 0.0;
  double sup_grad = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double r = psi.support_radius * i / samples;
    for (const auto& dir : dirs) {
      const typename TestFunction<Dim>::Vec x = r * dir.direction.template head<Dim>();
      sup_value = std::max(sup_value, std::abs(psi.value(x)));
      sup_grad = std::max(sup_grad, psi.gradient(x).norm());
    }
  }
  return sup_value + sup_grad;
}

QuadratureGrid::QuadratureGrid(const BumpParams& bump, int d, QuadratureOptions options)
    : bump_(bump), d_(d), options_(options) {
  if (d < 1 || d > 3) throw PreconditionViolation("QuadratureGrid: supports 1 <= d <= 3");
  if (options.n_split < 2) throw PreconditionViolation("QuadratureGrid: n_split must be >= 2");
  const long last = std::min(options.n_split, bump.n_cap() - 1);
  const int ramp_pieces = std::max(1, options.ramp_pieces);
  for (int lobe : {1, -1}) {
    for (long n = 2; n <= last; ++n) {
      const double a = breakpoint(n, bump);
      const double c = std::pow(static_cast<double>(n), -bump.theta());
      double r[4];
      for (int k = 0; k < 4; ++k) r[k] = lobe_radius(a + k * c, lobe, bump);
      push_ramp(radial_, r[0], r[1], n, lobe, Phase::RampUp, ramp_pieces);
      push_gauss(radial_, r[1], r[2], options.plateau_order, n, lobe, Phase::Plateau);
      push_ramp(radial_, r[2], r[3], n, lobe, Phase::RampDown, ramp_pieces);
    }
    if (last < bump.n_cap() - 1) {
      has_tail_ = true;
      const double lo = lobe_radius(breakpoint(last + 1, bump), lobe, bump);
      const double hi = lobe_radius(bump.a_inf(), lobe, bump);
      const int panels = std::max(1, options.tail_panels);
      for (int j = 0; j < panels; ++j) {
        push_gauss(radial_, lo + (hi - lo) * j / panels, lo + (hi - lo) * (j + 1) / panels,
                   options.tail_order, 0, lobe, Phase::Gap);
      }
    }
  }
  angular_ = angular_rule(d, options.angular_order);
}

QuadratureGrid QuadratureGrid::refined() const {
  QuadratureOptions finer = options_;
  if (has_tail_) finer.n_split *= 2;
  finer.plateau_order += 4;
  finer.tail_panels *= 2;
  finer.angular_order += 8;
  finer.ramp_pieces *= 2;
  return QuadratureGrid(bump_, d_, finer);
}

std::pair<double, double> QuadratureGrid::profile(const RadialNode& node,
                                                  const BumpParams& bump) const {
  if (node.block == 0) {
    double dv = 0.0;
    try {
      dv = eval_v_prime(node.r, bump);
    } catch (const NotDifferentiable&) {
      dv = 0.0;  // a node on a transition pull-back: a null set
    }
    return {eval_v(node.r, bump), dv};
  }
  const double scale = 16 * bump.zeta_theta().value;
  const double sigma = bump.sigma();
  const double c = std::pow(static_cast<double>(node.block), -bump.theta());
  double v = 0.0;
  double dv = 0.0;
  switch (node.phase) {
    case Phase::RampUp: {
      const double arg = node.dist_left <= node.dist_right ? scale * node.dist_left
                                                           : c - scale * node.dist_right;
      v = std::pow(arg, sigma);
      dv = scale * sigma * std::pow(arg, sigma - 1);
      break;
    }
    case Phase::RampDown: {
      const double arg = node.dist_right <= node.dist_left ? scale * node.dist_right
                                                           : c - scale * node.dist_left;
      v = std::pow(arg, sigma);
      dv = -scale * sigma * std::pow(arg, sigma - 1);
      break;
    }
    case Phase::Plateau:
      v = std::pow(static_cast<double>(node.block), -bump.theta() * sigma);
      break;
    default: break;
  }
  return {node.lobe * v, node.lobe * dv};
}

namespace {

void check_grid(const QuadratureGrid& grid, const RadialFieldSpec& spec, int dim) {
  if (grid.dimension() != dim || spec.d != dim) {
    throw PreconditionViolation("grid, field and test function dimensions differ");
  }
}

template <int Dim>
double weak_sum(const TestFunction<Dim>& psi, const RadialFieldSpec& spec,
                const QuadratureGrid& grid) {
  double total = 0.0;
  for (const auto& node : grid.radial()) {
    const double v = grid.profile(node, spec.dual_bump).first;
    if (v == 0.0) continue;
    double shell = 0.0;
    for (const auto& ang : grid.angular()) {
      const typename TestFunction<Dim>::Vec dir = ang.direction.template head<Dim>();
      shell += ang.weight * dir.dot(psi.gradient(node.r * dir));
    }
    total += node.weight * std::pow(node.r, Dim - 1) * v * shell;
  }
  return total;
}

}  // namespace

template <int Dim>
double f_weak(const TestFunction<Dim>& psi, const RadialFieldSpec& spec,
              const QuadratureGrid& grid, const WeakFormOptions& options) {
  check_grid(grid, spec, Dim);
  const double coarse = weak_sum(psi, spec, grid);
  const double fine = weak_sum(psi, spec, grid.refined());
  const double gap = std::abs(fine - coarse);
  if (gap > options.tolerance * (1 + std::abs(fine))) {
    throw GridTooCoarse(gap, options.tolerance, "f_weak: refined grid disagrees");
  }
  return fine;
}

template <int Dim>
double f_strong_integral(const TestFunction<Dim>& psi, const RadialFieldSpec& spec,
                         const QuadratureGrid& grid) {
  check_grid(grid, spec, Dim);
  double total = 0.0;
  for (const auto& node : grid.radial()) {
    const auto [v, dv] = grid.profile(node, spec.dual_bump);
    const double f = -dv - v * (Dim - 1) / node.r;
    if (f == 0.0) continue;
    double shell = 0.0;
    for (const auto& ang : grid.angular()) {
      const typename TestFunction<Dim>::Vec dir = ang.direction.template head<Dim>();
      shell += ang.weight * psi.value(node.r * dir);
    }
    total += node.weight * std::pow(node.r, Dim - 1) * f * shell;
  }
  return total;
}

template <int Dim>
double weak_form_oracle(const TestFunction<Dim>& psi, const RadialFieldSpec& spec,
                        int angular_points) {
  using Vec = typename TestFunction<Dim>::Vec;
  if (spec.d != Dim) throw PreconditionViolation("weak_form_oracle: dimension mismatch");
  if (angular_points < 4) throw PreconditionViolation("weak_form_oracle: too few angles");
  std::vector<std::pair<Vec, double>> dirs;
  if (Dim == 1) {
    dirs.push_back({Vec::Constant(1.0), 1.0});
    dirs.push_back({Vec::Constant(-1.0), 1.0});
  } else {
    const GaussRule& z_rule = gauss_legendre(Dim == 3 ? angular_points / 2 : 1);
    const int z_count = Dim == 3 ? angular_points / 2 : 1;
    for (int k = 0; k < z_count; ++k) {
      const double z = Dim == 3 ? z_rule.nodes[k] : 0.0;
      const double wz = Dim == 3 ? z_rule.weights[k] : 1.0;
      const double s = std::sqrt(1 - z * z);
      for (int i = 0; i < angular_points; ++i) {
        const double phi = kTwoPi * i / angular_points;
        Eigen::Vector3d e(s * std::cos(phi), s * std::sin(phi), z);
        dirs.push_back({e.head<Dim>(), wz * kTwoPi / angular_points});
      }
    }
  }
  auto integrand = [&](double r, double, double) {
    const double v = eval_v(r, spec.bump);
    if (v == 0.0) return 0.0;
    const double a = std::pow(std::abs(v), spec.p - 2) * v;
    double shell = 0.0;
    double shell_abs = 0.0;
    for (const auto& [dir, weight] : dirs) {
      const double term = weight * dir.dot(psi.gradient(r * dir));
      shell += term;
      shell_abs += std::abs(term);
    }
    // an angular sum that cancels to roundoff is zero; left as noise it
    // keeps the panel tolerance from ever being met
    if (std::abs(shell) <= 64 * std::numeric_limits<double>::epsilon() * shell_abs) return 0.0;
    return std::pow(r, Dim - 1) * a * shell;
  };
  // w vanishes on gaps and outside the support; the pulled-back panel ends
  // leave roundoff slivers there that the integrator would chase
  auto carries_field = [&](double lo, double hi) {
    const LobeArguments t = lobe_arguments(0.5 * (lo + hi), spec.bump);
    for (double xi : {t.positive, t.negative}) {
      const auto loc = try_locate(xi, spec.bump);
      if (loc && loc->phase != Phase::Gap && loc->phase != Phase::OutsideLeft &&
          loc->phase != Phase::OutsideRight) {
        return true;
      }
    }
    return false;
  };
  auto panel = [&](double lo, double hi) {
    return carries_field(lo, hi) ? tanh_sinh_panel(integrand, lo, hi, 1e-11).value : 0.0;
  };
  const auto edges = radial_breakpoints(spec.bump, spec.bump.n_cap());
  double total = 0.0;
  double lo = 0.25;
  for (double hi : edges) {
    if (hi <= lo) continue;
    total += panel(lo, std::min(hi, 0.75));
    lo = hi;
    if (lo >= 0.75) break;
  }
  if (lo < 0.75) total += panel(lo, 0.75);
  return total;
}

double radial_lp_norm(const std::function<double(double)>& g, double rho, int d,
                      const std::vector<double>& breakpoints) {
  if (!(rho > 0)) throw PreconditionViolation("radial_lp_norm: rho must be > 0");
  if (d < 1) throw PreconditionViolation("radial_lp_norm: need d >= 1");
  std::vector<double> edges{0.25, 0.75};
  for (double b : breakpoints) {
    if (b > 0.25 && b < 0.75) edges.push_back(b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  if (std::isinf(rho)) {
    double best = 0.0;
    constexpr int kPerPanel = 64;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      for (int k = 0; k <= kPerPanel; ++k) {
        const double r = edges[i] + (edges[i + 1] - edges[i]) * k / kPerPanel;
        best = std::max(best, std::abs(g(r)));
      }
    }
    return best;
  }
  double total = 0.0;
  auto integrand = [&](double r, double, double) {
    return std::pow(std::abs(g(r)), rho) * std::pow(r, d - 1);
  };
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    PanelResult res = de_panel(integrand, edges[i], edges[i + 1]);
    if (!(res.error <= 1e-12 * std::abs(res.value) + 1e-300)) {
      res = tanh_sinh_panel(integrand, edges[i], edges[i + 1], 1e-12);
    }
    total += res.value;
  }
  return std::pow(sphere_area(d) * total, 1.0 / rho);
}

std::vector<double> radial_breakpoints(const BumpParams& bump, long n_max) {
  std::vector<double> out{0.5};
  const long last = std::min(n_max, bump.n_cap() - 1);
  for (int lobe : {1, -1}) {
    for (long n = 2; n <= last; ++n) {
      const double a = breakpoint(n, bump);
      const double c = std::pow(static_cast<double>(n), -bump.theta());
      for (int k = 0; k < 4; ++k) out.push_back(lobe_radius(a + k * c, lobe, bump));
    }
    out.push_back(lobe_radius(breakpoint(last + 1, bump), lobe, bump));
    out.push_back(lobe_radius(bump.a_inf(), lobe, bump));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

#define PBESOV_INSTANTIATE(DIM)                                                          \
  template TestFunction<DIM> bump_test_function<DIM>(double,                            \
                                                     const Eigen::Matrix<int, DIM, 1>&); \
  template TestFunction<DIM> plateau_test_function<DIM>(double, double);                \
  template std::vector<TestFunction<DIM>> test_function_suite<DIM>();                   \
  template double w1_inf_norm<DIM>(const TestFunction<DIM>&, int);                      \
  template double f_weak<DIM>(const TestFunction<DIM>&, const RadialFieldSpec&,         \
                              const QuadratureGrid&, const WeakFormOptions&);           \
  template double f_strong_integral<DIM>(const TestFunction<DIM>&,                      \
                                         const RadialFieldSpec&, const QuadratureGrid&); \
  template double weak_form_oracle<DIM>(const TestFunction<DIM>&, const RadialFieldSpec&, int);

PBESOV_INSTANTIATE(1)
PBESOV_INSTANTIATE(2)
PBESOV_INSTANTIATE(3)

#undef PBESOV_INSTANTIATE

}  // namespace pbesov
