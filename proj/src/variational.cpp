#include "bec/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bec {

namespace {

const double sqrt_2pi = std::sqrt(2.0 * constants::pi);

void require_positive_width(double s) {
  if (!(s > 0.0) || !std::isfinite(s))
    throw std::invalid_argument("width must be positive and finite, got " + std::to_string(s));
}

} // namespace

double total_energy_joules(const EnergyBreakdown& e, double n_atoms, const OscillatorScales& sc) {
  return n_atoms * sc.energy_hw * e.total;
}

EnergyBreakdown energy_1d(double s, double gamma) {
  require_positive_width(s);
  EnergyBreakdown e;
  e.kinetic = 1.0 / (4.0 * s * s);
  e.potential = s * s / 4.0;
  e.interaction = gamma / (sqrt_2pi * s);
  e.total = e.kinetic + e.potential + e.interaction;
  return e;
}

EnergyBreakdown energy_3d(double s, double gamma) {
  require_positive_width(s);
  EnergyBreakdown e;
  e.kinetic = 3.0 / (4.0 * s * s);
  e.potential = 3.0 * s * s / 4.0;
  e.interaction = gamma / (sqrt_2pi * s * s * s);
  e.total = e.kinetic + e.potential + e.interaction;
  return e;
}

EnergyBreakdown energy(const GaussianAnsatz& ansatz) {
  return ansatz.problem.dimension == Dimension::D1 ? energy_1d(ansatz.s, ansatz.problem.gamma_total)
                                                   : energy_3d(ansatz.s, ansatz.problem.gamma_total);
}

double denergy(double s, const DimensionlessProblem& problem, int order) {
  require_positive_width(s);
  const double g = problem.gamma_total / sqrt_2pi;
  const double s2 = s * s;
  const double s4 = s2 * s2;
  if (problem.dimension == Dimension::D3) {
    switch (order) {
    // Factored so that the bracket vanishes cleanly at a root.
    case 1: return 1.5 / s4 * ((s4 - 1.0) * s - 2.0 * g);
    case 2: return 4.5 / s4 + 1.5 + 12.0 * g / (s4 * s);
    case 3: return -18.0 / (s4 * s) - 60.0 * g / (s4 * s2);
    default: break;
    }
  } else {
    switch (order) {
    case 1: return 0.5 / (s2 * s) * (s4 - 1.0 - 2.0 * g * s);
    case 2: return 1.5 / s4 + 0.5 + 2.0 * g / (s2 * s);
    case 3: return -6.0 / (s4 * s) - 6.0 * g / s4;
    default: break;
    }
  }
  throw std::invalid_argument("derivative order must be 1, 2 or 3");
}

std::string_view to_string(Extremum k) { return k == Extremum::Minimum ? "minimum" : "maximum"; }

std::string_view to_tag(Regime r) {
  switch (r) {
  case Regime::Noninteracting: return "noninteracting";
  case Regime::RepulsiveStable: return "repulsive_stable";
  case Regime::AttractiveSubcritical: return "attractive_subcritical";
  case Regime::AttractiveCritical: return "attractive_critical";
  case Regime::AttractiveCollapsed: return "collapsed";
  case Regime::Attractive1D: return "attractive_1d";
  }
  return "unknown";
}

std::optional<StationaryPoint> StabilityReport::stable() const {
  for (const auto& p : points)
    if (p.kind == Extremum::Minimum) return p;
  return std::nullopt;
}

std::optional<StationaryPoint> StabilityReport::unstable() const {
  for (const auto& p : points)
    if (p.kind == Extremum::Maximum) return p;
  return std::nullopt;
}

CriticalPoint critical_3d() {
  const double s_min = std::pow(5.0, -0.25);
  return {s_min, 2.0 * sqrt_2pi * std::pow(5.0, -1.25)};
}

namespace {

constexpr int grid_nodes = 256;
constexpr double bisection_width = 1e-14;

// Sign-change refinement of de/ds on [lo, hi]. f(lo) and f(hi) differ in sign,
// with zero counted as positive.
double refine_root(const DimensionlessProblem& problem, double lo, double hi) {
  auto positive = [&](double s) { return denergy(s, problem, 1) >= 0.0; };
  const bool lo_positive = positive(lo);
  while (hi - lo > bisection_width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (positive(mid) == lo_positive) lo = mid;
    else hi = mid;
  }
  double s = 0.5 * (lo + hi);
  const double f = denergy(s, problem, 1);
  const double df = denergy(s, problem, 2);
  if (df != 0.0 && std::isfinite(df)) {
    const double polished = s - f / df;
    if (polished > 0.0 && std::abs(denergy(polished, problem, 1)) < std::abs(f)) s = polished;
  }
  return s;
}

StationaryPoint make_point(double s, const DimensionlessProblem& problem, Extremum kind) {
  StationaryPoint p;
  p.s = s;
  p.kind = kind;
  p.energy = energy(GaussianAnsatz{s, problem});
  p.residual = std::abs(denergy(s, problem, 1));
  return p;
}

std::vector<double> scan_grid(const DimensionlessProblem& problem) {
  const double g = std::abs(problem.gamma_total) / sqrt_2pi;
  double lo = 1e-4;
  double hi = 1e3;
  // Keep extreme couplings' roots inside the grid: the small 3D root sits near
  // 2|g|, the strongly attractive 1D root near 1/(2|g|).
  if (g > 0.0) {
    lo = std::min(lo, problem.dimension == Dimension::D3 ? 0.5 * g : 0.25 / g);
    hi = std::max(hi, 2.0 + 2.0 * g);
  }
  std::vector<double> nodes(grid_nodes);
  const double step = std::log(hi / lo) / (grid_nodes - 1);
  for (int k = 0; k < grid_nodes; ++k) nodes[k] = lo * std::exp(step * k);
  nodes.back() = hi;
  if (problem.dimension == Dimension::D3 && problem.gamma_total < 0.0) {
    // de/ds * s^4 has its only turning point at 5^{-1/4}; a node there
    // separates the two roots however close to criticality they are.
    nodes.push_back(critical_3d().s_min);
    std::sort(nodes.begin(), nodes.end());
  }
  return nodes;
}

} // namespace

StabilityReport stationary_points(const DimensionlessProblem& problem) {
  if (!std::isfinite(problem.gamma_total))
    throw std::invalid_argument("coupling must be finite");

  StabilityReport report;
  report.problem = problem;
  const double gamma = problem.gamma_total;
  const bool attractive_3d = problem.dimension == Dimension::D3 && gamma < 0.0;
  const CriticalPoint crit = critical_3d();

  if (gamma == 0.0) report.regime = Regime::Noninteracting;
  else if (gamma > 0.0) report.regime = Regime::RepulsiveStable;
  else if (problem.dimension == Dimension::D1) report.regime = Regime::Attractive1D;
  else if (std::abs(gamma + crit.gamma_critical) < critical_window)
    report.regime = Regime::AttractiveCritical;
  else if (-gamma > crit.gamma_critical) report.regime = Regime::AttractiveCollapsed;
  else report.regime = Regime::AttractiveSubcritical;

  if (attractive_3d) {
    report.s_min_critical = crit.s_min;
    report.gamma_critical = crit.gamma_critical;
  }

  if (report.regime == Regime::AttractiveCollapsed) return report;

  if (report.regime == Regime::AttractiveCritical) {
    // Double root: de/ds touches zero without changing sign and d2e/ds2
    // vanishes too. Convention: d3e/ds3 > 0 means e increases through s_min,
    // so compression lowers the energy and the point is reported as a
    // Maximum (marginally unstable); d3e/ds3 < 0 would give a Minimum.
    const double third = denergy(crit.s_min, problem, 3);
    report.points.push_back(
        make_point(crit.s_min, problem, third > 0.0 ? Extremum::Maximum : Extremum::Minimum));
    return report;
  }

  const std::vector<double> nodes = scan_grid(problem);
  bool prev_positive = denergy(nodes.front(), problem, 1) >= 0.0;
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const bool positive = denergy(nodes[k], problem, 1) >= 0.0;
    if (positive != prev_positive) {
      const double s = refine_root(problem, nodes[k - 1], nodes[k]);
      const double curvature = denergy(s, problem, 2);
      report.points.push_back(
          make_point(s, problem, curvature > 0.0 ? Extremum::Minimum : Extremum::Maximum));
    }
    prev_positive = positive;
  }

  const std::size_t expected = report.regime == Regime::AttractiveSubcritical ? 2 : 1;
  if (report.points.size() != expected)
    throw std::logic_error("stationary_points: found " + std::to_string(report.points.size()) +
                           " roots for coupling " + std::to_string(gamma) + ", expected " +
                           std::to_string(expected));
  return report;
}

double gamma_at_width(double s, Dimension dim) {
  require_positive_width(s);
  if (dim == Dimension::D3) return 0.5 * sqrt_2pi * (std::pow(s, 5) - s);
  return 0.5 * sqrt_2pi * (std::pow(s, 4) - 1.0) / s;
}

double n_of_sigma(double sigma_m, const PhysicalSetup& setup) {
  require_positive_width(sigma_m);
  const double b = setup.coupling();
  if (b == 0.0) throw std::invalid_argument("N(sigma) is undefined without interaction");
  const double trap = 0.5 * setup.mass * setup.omega * setup.omega;
  const double kin = constants::hbar * constants::hbar / (2.0 * setup.mass);
  const double two_pi = 2.0 * constants::pi;
  if (setup.dimension == Dimension::D3)
    return std::pow(two_pi, 1.5) / b * (trap * std::pow(sigma_m, 5) - kin * sigma_m);
  return std::sqrt(two_pi) / b * (trap * std::pow(sigma_m, 3) - kin / sigma_m);
}

double MaxAtomNumber::floor() const {
  return unbounded ? std::numeric_limits<double>::infinity() : std::floor(direct);
}

MaxAtomNumber n_max_physical(const PhysicalSetup& setup) {
  setup.validate();
  MaxAtomNumber out;
  const OscillatorScales sc = derive_scales(setup);
  if (setup.dimension == Dimension::D1 || !(*setup.scattering_length < 0.0)) {
    out.unbounded = true;
    out.direct = out.via_gamma = std::numeric_limits<double>::infinity();
    // 1D attractive widths shrink to zero; repulsive ones never drop below a_ho.
    out.sigma_min = setup.dimension == Dimension::D1 && *setup.coupling_1d < 0.0 ? 0.0 : sc.length_aho;
    return out;
  }
  const CriticalPoint crit = critical_3d();
  const double b_tilde = -setup.coupling();
  const double kin = constants::hbar * constants::hbar / (2.0 * setup.mass);
  out.direct = 4.0 / std::pow(5.0, 1.25) * std::pow(2.0 * constants::pi, 1.5) / b_tilde * kin *
               sc.length_aho;
  out.via_gamma = n_from_gamma(-crit.gamma_critical, setup);
  out.sigma_min = crit.s_min * sc.length_aho;
  if (std::abs(out.direct - out.via_gamma) > 1e-10 * out.direct)
    throw std::logic_error("critical atom number paths disagree");
  return out;
}

} // namespace bec
