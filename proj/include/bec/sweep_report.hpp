#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bec/gpe_oracle.hpp"

namespace bec {

/// One line of a parameter sweep. Energies are per particle in hbar*omega,
/// widths in oscillator lengths.
struct SweepRow {
  double n_atoms = 0.0;
  double gamma = 0.0;
  std::optional<double> s_stable;
  std::optional<double> s_unstable;
  std::optional<double> e_variational;
  std::optional<double> s_oracle;
  std::optional<double> e_oracle;
  std::string regime; // [a-z_]+

  bool operator==(const SweepRow&) const = default;
};

struct SweepOptions {
  GridSpec grid{};          // dimension is taken from the setup
  MinimizeOptions minimize{};
  unsigned workers = 0;     // 0: hardware concurrency
};

/// Variational (and optionally oracle) results for each atom number.
/// n_values must be non-empty, non-negative and ascending. Rows come back in
/// input order; oracle trouble is tagged onto the row's regime
/// ("_oracle_collapsed", "_oracle_unconverged") and never aborts the sweep.
std::vector<SweepRow> sweep(const PhysicalSetup& setup_template, const std::vector<double>& n_values,
                            bool with_oracle, const SweepOptions& options = {});

/// Single row for a given dimensionless problem; n_atoms is stored as given.
SweepRow evaluate_row(const DimensionlessProblem& problem, double n_atoms, bool with_oracle,
                      const SweepOptions& options = {});

inline constexpr const char* csv_header = "n_atoms,gamma,s_stable,s_unstable,e_var,s_oracle,e_oracle,regime";

/// Header plus one LF-terminated line per row. Numbers use the shortest
/// representation that round-trips; empty optionals are empty fields.
/// Throws std::runtime_error if the stream fails.
void emit_csv(const std::vector<SweepRow>& rows, std::ostream& out);

std::vector<SweepRow> parse_csv(std::istream& in);

} // namespace bec
