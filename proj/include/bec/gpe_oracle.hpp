#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "bec/variational.hpp"

namespace bec {

enum class GridKind { D1, D3Radial };

/// Uniform grid in oscillator units. D3Radial covers [0, r_max] with
/// n_points nodes; D1 covers [-r_max, r_max] with 2*n_points - 1 nodes.
/// Wave functions vanish on both ends.
struct GridSpec {
  GridKind dimension = GridKind::D3Radial;
  double r_max = 8.0;
  int n_points = 2048;

  void validate() const;
  double spacing() const { return r_max / (n_points - 1); }
  std::size_t size() const;
  /// Coordinate of node i (r in D3Radial, x in D1).
  double coordinate(std::size_t i) const;
};

/// Per-particle wave function on a grid. In D3Radial `values` holds
/// u(r) = r phi(r), normalised as 4 pi \int u^2 dr = 1; in D1 it holds phi(x)
/// with \int phi^2 dx = 1. The coupling is absorbed into gamma_total.
struct GridState {
  std::vector<double> values;
  GridSpec spec;
  double gamma_total = 0.0;
  EnergyBreakdown energy;
  long iterations = 0;
  bool converged = false;
  bool collapsed = false;
};

/// Trapezoidal norm (\int |phi|^2).
double grid_norm(const GridState& state);

/// Energy per particle in hbar*omega: three-point second difference for the
/// kinetic term and trapezoidal quadrature for the rest. Throws if the state
/// is not normalised to 1e-10.
EnergyBreakdown discrete_energy(const GridState& state);

/// Normalised Gaussian of width s sampled on the grid, energy filled in.
GridState gaussian_state(const GridSpec& spec, double s, double gamma);

struct IterationInfo {
  long iteration = 0;
  bool accepted = false;
  double step = 0.0;
  double energy_before = 0.0;
  double energy_after = 0.0; // equals energy_before on rejection
  double norm = 0.0;
};

struct MinimizeOptions {
  long max_iterations = 500000;
  double tolerance = 1e-11; // relative energy change over the window
  int window = 50;
  double initial_step = 0.01;
  int grow_after = 100; // consecutive accepted steps before the step doubles
  double max_step_factor = 8.0;
  std::function<void(const IterationInfo&)> observer;
};

/// Norm-preserving descent on the discrete energy.
///
/// Each iteration takes a backward-Euler gradient step with the mean-field
/// potential frozen at the current state, i.e. solves
///   (1 + tau (-D2 + x^2 + V[phi])) phi' = phi
/// and renormalises. The step halves whenever the energy would rise and
/// doubles after `grow_after` consecutive accepted steps, up to
/// initial_step * max_step_factor. Stops when the energy settles, when the
/// state collapses (rms width below four grid spacings, or energy below
/// -1e3), or at the iteration cap with converged = false.
GridState minimize(const GridSpec& spec, double gamma, const std::optional<GridState>& init = {},
                   const MinimizeOptions& options = {});

/// sqrt(2<r^2>/3) in 3D and sqrt(2<x^2>) in 1D; equals s for a Gaussian of
/// width s. No validity checks.
double rms_width(const GridState& state);

/// rms_width() for a usable state. Throws for collapsed states and for
/// minimisation results that did not converge.
double measured_width(const GridState& state);

/// Bisection on the coupling between a collapsing (gamma_lo) and a
/// converging (gamma_hi) attractive endpoint until the bracket is narrower
/// than `width`. Returns the bracket midpoint.
double critical_scan(const GridSpec& spec, double gamma_lo, double gamma_hi, double width = 0.01,
                     const MinimizeOptions& options = {});

/// Two-column CSV "r,density" of |phi|^2 (x instead of r in 1D).
void write_density_csv(const GridState& state, std::ostream& out);

} // namespace bec
