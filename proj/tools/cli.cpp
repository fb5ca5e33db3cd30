#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "bec/sweep_report.hpp"

namespace bec::cli {

namespace {

using nlohmann::json;

// Failures of the numerics rather than of the command line.
struct ComputeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  double mass_amu = 0, freq_hz = 0, scattering_a = 0, coupling_1d = 0, n_atoms = 0, gamma = 0;
  int dim = 3;
  double r_max = GridSpec{}.r_max;
  int n_points = GridSpec{}.n_points;
  std::string n_list;
  double n_min = 0, n_max = 0;
  int n_steps = 0;
  bool log_spacing = false;
  bool with_oracle = false;
  unsigned workers = 0;
  std::string csv;
  std::string profile;
  bool json = false;
};

struct Options {
  CLI::Option* config = nullptr;
  CLI::Option* mass = nullptr;
  CLI::Option* freq = nullptr;
  CLI::Option* scattering = nullptr;
  CLI::Option* coupling = nullptr;
  CLI::Option* dim = nullptr;
  CLI::Option* n_atoms = nullptr;
  CLI::Option* gamma = nullptr;
};

Options add_setup_flags(CLI::App* cmd, Flags& f) {
  Options o;
  o.config = cmd->add_option("--config", f.config, "key=value setup file (flags override it)");
  o.mass = cmd->add_option("--mass-amu", f.mass_amu, "atomic mass in u");
  o.freq = cmd->add_option("--freq-hz", f.freq_hz, "trap frequency omega/(2 pi) in Hz");
  o.scattering = cmd->add_option("--scattering-a", f.scattering_a, "s-wave scattering length in m (3D)");
  o.coupling = cmd->add_option("--coupling-1d", f.coupling_1d, "contact coupling in J m (1D)");
  o.dim = cmd->add_option("--dim", f.dim, "dimension")->check(CLI::IsMember({1, 3}));
  o.n_atoms = cmd->add_option("--n-atoms", f.n_atoms, "atom number")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--json", f.json, "machine-readable output");
  return o;
}

void add_gamma_flag(CLI::App* cmd, Flags& f, Options& o) {
  o.gamma = cmd->add_option("--gamma", f.gamma, "dimensionless coupling, bypasses the SI setup");
}

void add_grid_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--r-max", f.r_max, "grid extent in oscillator lengths");
  cmd->add_option("--n-points", f.n_points, "grid points per half-axis");
}

bool given(const CLI::Option* opt) { return opt && opt->count() > 0; }

bool has_setup_flags(const Options& o) {
  return given(o.config) || given(o.mass) || given(o.freq) || given(o.scattering) ||
         given(o.coupling) || given(o.n_atoms);
}

SetupConfig collect_config(const Flags& f, const Options& o) {
  SetupConfig cfg;
  if (given(o.config)) cfg = load_setup_config(f.config);
  SetupConfig over;
  if (given(o.mass)) over.mass_amu = f.mass_amu;
  if (given(o.freq)) over.freq_hz = f.freq_hz;
  if (given(o.scattering)) over.scattering_a_m = f.scattering_a;
  if (given(o.coupling)) over.coupling_1d_jm = f.coupling_1d;
  if (given(o.dim)) over.dim = f.dim;
  if (given(o.n_atoms)) over.n_atoms = f.n_atoms;
  cfg.merge(over);
  return cfg;
}

int effective_dim(const SetupConfig& cfg) {
  if (cfg.dim) return *cfg.dim;
  if (cfg.coupling_1d_jm && !cfg.scattering_a_m) return 1;
  return 3;
}

/// Dimensionless problem either from --gamma or from the SI setup.
struct ProblemSource {
  DimensionlessProblem problem;
  std::optional<PhysicalSetup> setup;
};

ProblemSource resolve_problem(const Flags& f, const Options& o) {
  if (given(o.gamma)) {
    if (has_setup_flags(o))
      throw std::invalid_argument("--gamma cannot be combined with physical setup flags");
    if (!std::isfinite(f.gamma)) throw std::invalid_argument("--gamma must be finite");
    return {{f.dim == 1 ? Dimension::D1 : Dimension::D3, f.gamma}, std::nullopt};
  }
  if (!has_setup_flags(o))
    throw std::invalid_argument("give either --gamma or a physical setup (--mass-amu, --freq-hz, ...)");
  const PhysicalSetup setup = collect_config(f, o).to_setup();
  return {reduce(setup), setup};
}

GridSpec grid_for(const Flags& f, Dimension d) {
  GridSpec g;
  g.dimension = d == Dimension::D1 ? GridKind::D1 : GridKind::D3Radial;
  g.r_max = f.r_max;
  g.n_points = f.n_points;
  g.validate();
  return g;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(15) << v;
  return s.str();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json energy_json(const EnergyBreakdown& e) {
  return {{"kinetic", e.kinetic}, {"potential", e.potential}, {"interaction", e.interaction},
          {"total", e.total}};
}

// ---------------------------------------------------------------- critical

int run_critical(const Flags& f, const Options& o, std::ostream& out) {
  const SetupConfig cfg = collect_config(f, o);
  const int dim = effective_dim(cfg);
  const CriticalPoint crit = critical_3d();

  std::optional<MaxAtomNumber> nmax;
  std::optional<OscillatorScales> scales;
  if (dim == 1) {
    MaxAtomNumber unbounded;
    unbounded.unbounded = true;
    unbounded.direct = unbounded.via_gamma = std::numeric_limits<double>::infinity();
    nmax = unbounded;
  } else if (has_setup_flags(o)) {
    const PhysicalSetup setup = cfg.to_setup();
    nmax = n_max_physical(setup);
    scales = derive_scales(setup);
  }

  const double s_min = dim == 1 ? 0.0 : crit.s_min;
  if (f.json) {
    json j;
    j["s_min"] = s_min;
    j["gamma_crit"] = dim == 1 ? json(nullptr) : json(crit.gamma_critical);
    j["n_max_real"] = nmax ? number_or_null(nmax->direct) : json(nullptr);
    j["n_max_floor"] = nmax && !nmax->unbounded ? json(nmax->floor()) : json(nullptr);
    j["path_direct"] = nmax ? number_or_null(nmax->direct) : json(nullptr);
    j["path_dimensionless"] = nmax ? number_or_null(nmax->via_gamma) : json(nullptr);
    out << j.dump(2) << '\n';
    return exit_ok;
  }

  if (dim == 1) {
    out << "dimension          : 1\n"
        << "s_min              : 0 (the width shrinks without bound)\n"
        << "n_max              : unbounded (no collapse in 1D)\n";
    return exit_ok;
  }
  out << "dimension          : 3\n";
  out << "s_min              : " << fmt(crit.s_min) << " a_ho";
  if (scales && nmax && !nmax->unbounded) out << " = " << fmt(nmax->sigma_min) << " m";
  out << '\n';
  out << "gamma_crit         : " << fmt(crit.gamma_critical) << '\n';
  if (!nmax) {
    out << "n_max              : needs --mass-amu, --freq-hz and --scattering-a\n";
  } else if (nmax->unbounded) {
    out << "n_max              : unbounded (repulsive or non-interacting gas)\n";
  } else {
    out << "n_max              : " << fmt(nmax->direct) << " (floor " << fmt(nmax->floor()) << ")\n"
        << "path_direct        : " << fmt(nmax->direct) << '\n'
        << "path_dimensionless : " << fmt(nmax->via_gamma) << '\n';
  }
  return exit_ok;
}

// ---------------------------------------------------------------- minimize

int run_minimize(const Flags& f, const Options& o, std::ostream& out) {
  const ProblemSource src = resolve_problem(f, o);
  const StabilityReport report = stationary_points(src.problem);
  if (f.json) {
    json points = json::array();
    for (const auto& p : report.points)
      points.push_back({{"s", p.s},
                        {"kind", std::string(to_string(p.kind))},
                        {"energy", energy_json(p.energy)},
                        {"residual", p.residual}});
    json j{{"dimension", std::string(to_string(src.problem.dimension))},
           {"gamma", src.problem.gamma_total},
           {"regime", std::string(to_tag(report.regime))},
           {"points", points},
           {"s_min_critical", report.s_min_critical ? json(*report.s_min_critical) : json(nullptr)},
           {"gamma_critical", report.gamma_critical ? json(*report.gamma_critical) : json(nullptr)}};
    out << j.dump(2) << '\n';
    return exit_ok;
  }
  out << "dimension : " << to_string(src.problem.dimension) << '\n'
      << "gamma     : " << fmt(src.problem.gamma_total) << '\n'
      << "regime    : " << to_tag(report.regime) << '\n';
  if (report.points.empty()) out << "no stationary width: the condensate collapses\n";
  std::optional<OscillatorScales> scales;
  if (src.setup) scales = derive_scales(*src.setup);
  for (const auto& p : report.points) {
    out << to_string(p.kind) << ": s = " << fmt(p.s);
    if (scales) out << " (" << fmt(p.s * scales->length_aho) << " m)";
    out << ", E = " << fmt(p.energy.total) << " hbar*omega per particle"
        << " [kin " << fmt(p.energy.kinetic) << ", pot " << fmt(p.energy.potential) << ", int "
        << fmt(p.energy.interaction) << "]\n";
  }
  if (report.gamma_critical)
    out << "critical  : s_min = " << fmt(*report.s_min_critical)
        << ", gamma_crit = " << fmt(*report.gamma_critical) << '\n';
  return exit_ok;
}

// ---------------------------------------------------------------- sweep

std::vector<double> atom_numbers(const Flags& f, const CLI::App* cmd) {
  const bool list = cmd->get_option("--n-list")->count() > 0;
  const bool range = cmd->get_option("--n-min")->count() > 0 || cmd->get_option("--n-max")->count() > 0 ||
                     cmd->get_option("--n-steps")->count() > 0;
  if (list == range) throw std::invalid_argument("give exactly one of --n-list or --n-min/--n-max/--n-steps");
  std::vector<double> values;
  if (list) {
    std::stringstream ss(f.n_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size())
        throw std::invalid_argument("--n-list: bad entry '" + item + "'");
      values.push_back(v);
    }
    return values;
  }
  if (f.n_steps < 2) throw std::invalid_argument("--n-steps must be at least 2");
  if (!(f.n_min >= 0.0) || !(f.n_max > f.n_min))
    throw std::invalid_argument("need 0 <= --n-min < --n-max");
  if (f.log_spacing && !(f.n_min > 0.0)) throw std::invalid_argument("--log needs --n-min > 0");
  for (int k = 0; k < f.n_steps; ++k) {
    const double t = static_cast<double>(k) / (f.n_steps - 1);
    values.push_back(f.log_spacing ? f.n_min * std::pow(f.n_max / f.n_min, t)
                                   : f.n_min + t * (f.n_max - f.n_min));
  }
  values.back() = f.n_max;
  return values;
}

void write_rows(const std::vector<SweepRow>& rows, const std::string& target, std::ostream& out) {
  if (target.empty() || target == "-") {
    emit_csv(rows, out);
    return;
  }
  std::ofstream file(target, std::ios::binary);
  if (!file) throw std::invalid_argument("cannot open '" + target + "' for writing");
  emit_csv(rows, file);
}

int run_sweep(const Flags& f, const Options& o, const CLI::App* cmd, std::ostream& out) {
  if (!has_setup_flags(o)) throw std::invalid_argument("sweep needs a physical setup");
  const PhysicalSetup setup = collect_config(f, o).to_setup();
  const std::vector<double> ns = atom_numbers(f, cmd);
  SweepOptions opts;
  opts.grid = grid_for(f, setup.dimension);
  opts.workers = f.workers;
  write_rows(sweep(setup, ns, f.with_oracle, opts), f.csv, out);
  return exit_ok;
}

// ---------------------------------------------------------------- oracle

int run_oracle(const Flags& f, const Options& o, std::ostream& out) {
  const ProblemSource src = resolve_problem(f, o);
  const GridSpec grid = grid_for(f, src.problem.dimension);
  const GridState state = minimize(grid, src.problem.gamma_total);
  if (!f.profile.empty()) {
    std::ofstream file(f.profile);
    if (!file) throw std::invalid_argument("cannot open '" + f.profile + "' for writing");
    write_density_csv(state, file);
  }
  const std::optional<double> width =
      state.converged ? std::optional<double>(measured_width(state)) : std::nullopt;
  if (f.json) {
    json j{{"gamma", state.gamma_total},
           {"energy", energy_json(state.energy)},
           {"width", width ? json(*width) : json(nullptr)},
           {"iterations", state.iterations},
           {"converged", state.converged},
           {"collapsed", state.collapsed}};
    out << j.dump(2) << '\n';
  } else {
    out << "gamma      : " << fmt(state.gamma_total) << '\n'
        << "grid       : " << (grid.dimension == GridKind::D1 ? "1d" : "3d radial") << ", r_max "
        << fmt(grid.r_max) << ", " << grid.n_points << " points\n"
        << "iterations : " << state.iterations << '\n';
    if (state.collapsed) {
      out << "status     : collapsed\n";
    } else {
      out << "status     : " << (state.converged ? "converged" : "not converged") << '\n'
          << "energy     : " << fmt(state.energy.total) << " hbar*omega per particle [kin "
          << fmt(state.energy.kinetic) << ", pot " << fmt(state.energy.potential) << ", int "
          << fmt(state.energy.interaction) << "]\n";
      if (width) out << "width      : " << fmt(*width) << '\n';
    }
  }
  if (!state.converged && !state.collapsed)
    throw ComputeError("oracle did not converge within " + std::to_string(state.iterations) + " iterations");
  return exit_ok;
}

// ---------------------------------------------------------------- compare

int run_compare(const Flags& f, const Options& o, std::ostream& out) {
  const ProblemSource src = resolve_problem(f, o);
  SweepOptions opts;
  opts.grid = grid_for(f, src.problem.dimension);
  const double n = src.setup ? src.setup->n_atoms : std::numeric_limits<double>::quiet_NaN();
  const SweepRow row = evaluate_row(src.problem, n, true, opts);
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  if (f.json) {
    json j{{"n_atoms", number_or_null(n)}, {"gamma", row.gamma},
           {"s_stable", opt(row.s_stable)},  {"s_unstable", opt(row.s_unstable)},
           {"e_var", opt(row.e_variational)}, {"s_oracle", opt(row.s_oracle)},
           {"e_oracle", opt(row.e_oracle)},  {"regime", row.regime}};
    out << j.dump(2) << '\n';
  } else {
    auto show = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("-"); };
    out << "gamma   : " << fmt(row.gamma) << '\n'
        << "regime  : " << row.regime << '\n'
        << "              variational        oracle\n"
        << "width   : " << std::setw(18) << show(row.s_stable) << "  " << std::setw(18)
        << show(row.s_oracle) << '\n'
        << "energy  : " << std::setw(18) << show(row.e_variational) << "  " << std::setw(18)
        << show(row.e_oracle) << '\n';
    if (row.s_unstable) out << "barrier : " << std::setw(18) << show(row.s_unstable) << '\n';
  }
  if (row.regime.ends_with("_oracle_unconverged")) throw ComputeError("oracle did not converge");
  return exit_ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian-ansatz stability of a trapped Bose condensate, with a grid GP oracle",
               "gaussbec-cli"};
  app.require_subcommand(1);

  Flags f;
  auto* critical = app.add_subcommand("critical", "critical width, coupling and atom number");
  auto* minimize_cmd = app.add_subcommand("minimize", "stationary widths of the Gaussian energy");
  auto* sweep_cmd = app.add_subcommand("sweep", "CSV table over a list or range of atom numbers");
  auto* oracle = app.add_subcommand("oracle", "grid Gross-Pitaevskii ground state");
  auto* compare = app.add_subcommand("compare", "variational and oracle results side by side");

  Options o_critical = add_setup_flags(critical, f);
  Options o_minimize = add_setup_flags(minimize_cmd, f);
  add_gamma_flag(minimize_cmd, f, o_minimize);
  Options o_sweep = add_setup_flags(sweep_cmd, f);
  Options o_oracle = add_setup_flags(oracle, f);
  add_gamma_flag(oracle, f, o_oracle);
  Options o_compare = add_setup_flags(compare, f);
  add_gamma_flag(compare, f, o_compare);

  for (auto* cmd : {sweep_cmd, oracle, compare}) add_grid_flags(cmd, f);
  sweep_cmd->add_option("--n-list", f.n_list, "comma-separated ascending atom numbers");
  sweep_cmd->add_option("--n-min", f.n_min, "first atom number of a range");
  sweep_cmd->add_option("--n-max", f.n_max, "last atom number of a range");
  sweep_cmd->add_option("--n-steps", f.n_steps, "number of range points");
  sweep_cmd->add_flag("--log", f.log_spacing, "geometric range spacing");
  sweep_cmd->add_flag("--oracle", f.with_oracle, "also run the grid oracle per row");
  sweep_cmd->add_option("--workers", f.workers, "oracle worker threads (0: all cores)");
  sweep_cmd->add_option("--csv", f.csv, "output path, '-' for standard output")->default_str("-");
  oracle->add_option("--profile", f.profile, "write the density profile as CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? exit_ok : exit_invalid;
  }

  try {
    if (critical->parsed()) return run_critical(f, o_critical, out);
    if (minimize_cmd->parsed()) return run_minimize(f, o_minimize, out);
    if (sweep_cmd->parsed()) return run_sweep(f, o_sweep, sweep_cmd, out);
    if (oracle->parsed()) return run_oracle(f, o_oracle, out);
    if (compare->parsed()) return run_compare(f, o_compare, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_compute;
  }
  err << "error: no subcommand\n";
  return exit_invalid;
}

} // namespace bec::cli
