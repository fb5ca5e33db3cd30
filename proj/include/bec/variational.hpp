#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "bec/model_units.hpp"

namespace bec {

/// Per-particle energy of the Gaussian trial state, in units of hbar*omega.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;
  double interaction = 0.0;
  double total = 0.0;
};

/// Total energy K = N hbar omega e, in joules.
double total_energy_joules(const EnergyBreakdown& e, double n_atoms, const OscillatorScales& sc);

/// Gaussian trial state of width s = sigma / a_ho. The normalisation
/// constant is eliminated algebraically and never stored.
struct GaussianAnsatz {
  double s = 1.0;
  DimensionlessProblem problem;
};

EnergyBreakdown energy_1d(double s, double gamma);
EnergyBreakdown energy_3d(double s, double gamma);
EnergyBreakdown energy(const GaussianAnsatz& ansatz);

/// Analytic d^k e / ds^k for k in {1, 2, 3}.
double denergy(double s, const DimensionlessProblem& problem, int order);

enum class Extremum { Minimum, Maximum };

std::string_view to_string(Extremum k);

struct StationaryPoint {
  double s = 0.0;
  Extremum kind = Extremum::Minimum;
  EnergyBreakdown energy;
  double residual = 0.0; // |de/ds| at s
};

enum class Regime {
  Noninteracting,
  RepulsiveStable,
  AttractiveSubcritical,
  AttractiveCritical,
  AttractiveCollapsed,
  Attractive1D,
};

/// Lower-case tag used in CSV output: [a-z_]+.
std::string_view to_tag(Regime r);

struct StabilityReport {
  DimensionlessProblem problem;
  std::vector<StationaryPoint> points; // ascending in s
  Regime regime = Regime::Noninteracting;
  std::optional<double> s_min_critical; // 3D attractive only
  std::optional<double> gamma_critical; // 3D attractive only, positive magnitude

  /// The local minimum, if one exists.
  std::optional<StationaryPoint> stable() const;
  /// The barrier (local maximum), if one exists.
  std::optional<StationaryPoint> unstable() const;
};

/// Stationary widths of the Gaussian energy and their classification.
///
/// Roots of de/ds are bracketed on a logarithmic grid of 256 nodes spanning
/// at least [1e-4, 1e3], refined by bisection and polished by one Newton
/// step. Within 1e-9 of the 3D critical coupling the double root is
/// reported once as AttractiveCritical.
StabilityReport stationary_points(const DimensionlessProblem& problem);

struct CriticalPoint {
  double s_min = 0.0;          // 5^{-1/4}
  double gamma_critical = 0.0; // 2 sqrt(2 pi) / 5^{5/4}
};

CriticalPoint critical_3d();

/// Width of the 3D critical point within which stationary_points() reports
/// the degenerate (critical) regime.
inline constexpr double critical_window = 1e-9;

/// Coupling at which width s is stationary (the dimensionless N(sigma) curve).
double gamma_at_width(double s, Dimension dim);

/// Atom number whose energy is stationary at width sigma (metres), evaluated
/// from the SI formulas. May be negative: no physical N is stationary there.
double n_of_sigma(double sigma_m, const PhysicalSetup& setup);

/// Critical atom number for an attractive 3D gas. For repulsive or 1D setups
/// the atom number is unbounded.
struct MaxAtomNumber {
  bool unbounded = false;
  double direct = 0.0;     // SI closed form
  double via_gamma = 0.0;  // n_from_gamma(-gamma_critical)
  double sigma_min = 0.0;  // m

  double floor() const;
};

MaxAtomNumber n_max_physical(const PhysicalSetup& setup);

} // namespace bec
