#include "bec/model_units.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <stdexcept>

namespace bec {

std::string_view to_string(Dimension d) { return d == Dimension::D1 ? "1d" : "3d"; }

void PhysicalSetup::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw std::invalid_argument("mass must be positive and finite");
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw std::invalid_argument("trap frequency must be positive and finite");
  if (!(n_atoms >= 0.0) || !std::isfinite(n_atoms))
    throw std::invalid_argument("atom number must be non-negative and finite");
  if (dimension == Dimension::D3) {
    if (!scattering_length)
      throw std::invalid_argument("3D setup requires a scattering length");
    if (coupling_1d)
      throw std::invalid_argument("3D setup must not carry a 1D coupling");
    if (!std::isfinite(*scattering_length))
      throw std::invalid_argument("scattering length must be finite");
  } else {
    if (!coupling_1d)
      throw std::invalid_argument("1D setup requires a 1D coupling");
    if (scattering_length)
      throw std::invalid_argument("1D setup must not carry a scattering length");
    if (!std::isfinite(*coupling_1d))
      throw std::invalid_argument("1D coupling must be finite");
  }
}

double PhysicalSetup::coupling() const {
  validate();
  if (dimension == Dimension::D3)
    return 2.0 * constants::pi * constants::hbar * constants::hbar * *scattering_length / mass;
  return *coupling_1d;
}

PhysicalSetup PhysicalSetup::with_atoms(double n) const {
  PhysicalSetup copy = *this;
  copy.n_atoms = n;
  return copy;
}

PhysicalSetup make_setup_3d(double mass_amu, double freq_hz, double scattering_length_m,
                            double n_atoms) {
  PhysicalSetup s;
  s.mass = mass_amu * constants::amu;
  s.omega = 2.0 * constants::pi * freq_hz;
  s.dimension = Dimension::D3;
  s.scattering_length = scattering_length_m;
  s.n_atoms = n_atoms;
  s.validate();
  return s;
}

PhysicalSetup make_setup_1d(double mass_amu, double freq_hz, double coupling_jm,
                            double n_atoms) {
  PhysicalSetup s;
  s.mass = mass_amu * constants::amu;
  s.omega = 2.0 * constants::pi * freq_hz;
  s.dimension = Dimension::D1;
  s.coupling_1d = coupling_jm;
  s.n_atoms = n_atoms;
  s.validate();
  return s;
}

OscillatorScales derive_scales(const PhysicalSetup& setup) {
  if (!(setup.mass > 0.0) || !(setup.omega > 0.0))
    throw std::invalid_argument("mass and trap frequency must be positive");
  return {std::sqrt(constants::hbar / (setup.mass * setup.omega)),
          constants::hbar * setup.omega};
}

namespace {

// Interaction strength per atom in oscillator units: a/a_ho or B/(a_ho hbar omega).
double gamma_per_atom(const PhysicalSetup& setup) {
  setup.validate();
  const OscillatorScales sc = derive_scales(setup);
  if (setup.dimension == Dimension::D3)
    return *setup.scattering_length / sc.length_aho;
  return *setup.coupling_1d / (sc.length_aho * sc.energy_hw);
}

} // namespace

DimensionlessProblem reduce(const PhysicalSetup& setup) {
  // + 0.0 turns the -0 of N = 0 with an attractive interaction into +0.
  return {setup.dimension, setup.n_atoms * gamma_per_atom(setup) + 0.0};
}

double n_from_gamma(double gamma, const PhysicalSetup& setup) {
  const double per_atom = gamma_per_atom(setup);
  if (gamma == 0.0)
    throw std::invalid_argument("atom number is undefined for zero coupling");
  if (per_atom == 0.0)
    throw std::invalid_argument("atom number is undefined for a non-interacting setup");
  if ((gamma < 0.0) != (per_atom < 0.0))
    throw std::invalid_argument("coupling and interaction have opposite signs");
  return gamma / per_atom;
}

void SetupConfig::merge(const SetupConfig& over) {
  if (over.mass_amu) mass_amu = over.mass_amu;
  if (over.freq_hz) freq_hz = over.freq_hz;
  if (over.scattering_a_m) scattering_a_m = over.scattering_a_m;
  if (over.coupling_1d_jm) coupling_1d_jm = over.coupling_1d_jm;
  if (over.dim) dim = over.dim;
  if (over.n_atoms) n_atoms = over.n_atoms;
}

PhysicalSetup SetupConfig::to_setup() const {
  if (!mass_amu) throw std::invalid_argument("missing mass_amu");
  if (!freq_hz) throw std::invalid_argument("missing freq_hz");
  const int d = dim.value_or(scattering_a_m ? 3 : 1);
  if (d != 1 && d != 3) throw std::invalid_argument("dim must be 1 or 3");
  const double n = n_atoms.value_or(0.0);
  if (d == 3) {
    if (coupling_1d_jm) throw std::invalid_argument("coupling_1d_jm is only valid with dim=1");
    if (!scattering_a_m) throw std::invalid_argument("dim=3 requires scattering_a_m");
    return make_setup_3d(*mass_amu, *freq_hz, *scattering_a_m, n);
  }
  if (scattering_a_m) throw std::invalid_argument("scattering_a_m is only valid with dim=3");
  if (!coupling_1d_jm) throw std::invalid_argument("dim=1 requires coupling_1d_jm");
  return make_setup_1d(*mass_amu, *freq_hz, *coupling_1d_jm, n);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument("config: bad number for '" + std::string(key) + "': '" +
                                std::string(text) + "'");
  return value;
}

} // namespace

SetupConfig parse_setup_config(std::istream& in) {
  SetupConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string_view key = trim(view.substr(0, eq));
    const std::string_view value = trim(view.substr(eq + 1));
    if (key == "mass_amu") cfg.mass_amu = parse_number(key, value);
    else if (key == "freq_hz") cfg.freq_hz = parse_number(key, value);
    else if (key == "scattering_a_m") cfg.scattering_a_m = parse_number(key, value);
    else if (key == "coupling_1d_jm") cfg.coupling_1d_jm = parse_number(key, value);
    else if (key == "n_atoms") cfg.n_atoms = parse_number(key, value);
    else if (key == "dim") {
      const double d = parse_number(key, value);
      if (d != 1.0 && d != 3.0) throw std::invalid_argument("config: dim must be 1 or 3");
      cfg.dim = static_cast<int>(d);
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" +
                                  std::string(key) + "'");
    }
  }
  return cfg;
}

SetupConfig load_setup_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  return parse_setup_config(in);
}

} // namespace bec
