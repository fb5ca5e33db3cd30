#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace bec {

/// Physical constants are pinned so that reported critical numbers are reproducible.
namespace constants {
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double amu = 1.66053906660e-27;    // kg
inline constexpr double angstrom = 1.0e-10;         // m
inline constexpr double pi = 3.14159265358979323846;
} // namespace constants

enum class Dimension { D1, D3 };

std::string_view to_string(Dimension d);

/// Dimensional description of a trapped gas, SI units throughout.
///
/// In 3D the interaction enters through the s-wave scattering length and the
/// contact coupling is B = 2 pi hbar^2 a / m. In 1D the coupling B is given
/// directly. The sign of either carries the sign of the interaction.
struct PhysicalSetup {
  double mass = 0.0;   // kg
  double omega = 0.0;  // rad/s
  Dimension dimension = Dimension::D3;
  std::optional<double> scattering_length; // m, 3D only
  std::optional<double> coupling_1d;       // J m, 1D only
  double n_atoms = 0.0;

  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;

  /// Contact coupling B in SI (J m^3 in 3D, J m in 1D).
  double coupling() const;

  /// Same trap and interaction with a different atom number.
  PhysicalSetup with_atoms(double n) const;
};

PhysicalSetup make_setup_3d(double mass_amu, double freq_hz, double scattering_length_m,
                            double n_atoms);
PhysicalSetup make_setup_1d(double mass_amu, double freq_hz, double coupling_jm,
                            double n_atoms);

struct OscillatorScales {
  double length_aho = 0.0; // m
  double energy_hw = 0.0;  // J
};

/// Everything downstream depends only on the dimension and the signed
/// coupling gamma_total (N a / a_ho in 3D, N B / (a_ho hbar omega) in 1D).
struct DimensionlessProblem {
  Dimension dimension = Dimension::D3;
  double gamma_total = 0.0;

  bool operator==(const DimensionlessProblem&) const = default;
};

OscillatorScales derive_scales(const PhysicalSetup& setup);

DimensionlessProblem reduce(const PhysicalSetup& setup);

/// Inverse of reduce(): the atom number at which `setup` reaches `gamma`.
/// Throws when gamma or the interaction is zero, or their signs differ.
double n_from_gamma(double gamma, const PhysicalSetup& setup);

/// Key=value setup description. Recognised keys: mass_amu, freq_hz,
/// scattering_a_m, coupling_1d_jm, dim, n_atoms. '#' starts a comment.
struct SetupConfig {
  std::optional<double> mass_amu;
  std::optional<double> freq_hz;
  std::optional<double> scattering_a_m;
  std::optional<double> coupling_1d_jm;
  std::optional<int> dim;
  std::optional<double> n_atoms;

  /// Fields set in `over` replace the ones here.
  void merge(const SetupConfig& over);

  /// Throws std::invalid_argument if required keys are missing or inconsistent.
  PhysicalSetup to_setup() const;
};

SetupConfig parse_setup_config(std::istream& in);
SetupConfig load_setup_config(const std::string& path);

} // namespace bec
