#include "bec/sweep_report.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace bec {

SweepRow evaluate_row(const DimensionlessProblem& problem, double n_atoms, bool with_oracle,
                      const SweepOptions& options) {
  SweepRow row;
  row.n_atoms = n_atoms;
  row.gamma = problem.gamma_total;
  const StabilityReport report = stationary_points(problem);
  row.regime = std::string(to_tag(report.regime));
  if (const auto stable = report.stable()) {
    row.s_stable = stable->s;
    row.e_variational = stable->energy.total;
  }
  if (report.regime == Regime::AttractiveSubcritical) {
    if (const auto barrier = report.unstable()) row.s_unstable = barrier->s;
  } else if (report.regime == Regime::AttractiveCritical) {
    row.s_stable = report.points.front().s;
    row.e_variational = report.points.front().energy.total;
  }

  if (with_oracle) {
    GridSpec grid = options.grid;
    grid.dimension = problem.dimension == Dimension::D1 ? GridKind::D1 : GridKind::D3Radial;
    const GridState state = minimize(grid, problem.gamma_total, std::nullopt, options.minimize);
    if (state.collapsed) {
      if (report.regime != Regime::AttractiveCollapsed) row.regime += "_oracle_collapsed";
    } else if (!state.converged) {
      row.regime += "_oracle_unconverged";
    } else {
      row.s_oracle = measured_width(state);
      row.e_oracle = state.energy.total;
    }
  }
  return row;
}

std::vector<SweepRow> sweep(const PhysicalSetup& setup_template, const std::vector<double>& n_values,
                            bool with_oracle, const SweepOptions& options) {
  setup_template.validate();
  if (n_values.empty()) throw std::invalid_argument("sweep needs at least one atom number");
  for (double n : n_values)
    if (!(n >= 0.0) || !std::isfinite(n))
      throw std::invalid_argument("sweep atom numbers must be non-negative");
  if (!std::is_sorted(n_values.begin(), n_values.end()))
    throw std::invalid_argument("sweep atom numbers must be ascending");

  std::vector<SweepRow> rows(n_values.size());
  std::vector<std::exception_ptr> failures(n_values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n_values.size(); i = next++) {
      try {
        rows[i] = evaluate_row(reduce(setup_template.with_atoms(n_values[i])), n_values[i],
                               with_oracle, options);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(n_values.size()));
  if (!with_oracle) workers = 1;
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(work);
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return rows;
}

namespace {

void append_number(std::string& line, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  line.append(buf, ptr);
}

void append_optional(std::string& line, const std::optional<double>& v) {
  line.push_back(',');
  if (v) append_number(line, *v);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_field(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument("csv: bad number '" + std::string(text) + "'");
  return v;
}

std::optional<double> parse_optional(std::string_view text) {
  if (text.empty()) return std::nullopt;
  return parse_field(text);
}

} // namespace

void emit_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  std::string text = csv_header;
  text.push_back('\n');
  for (const auto& row : rows) {
    append_number(text, row.n_atoms);
    text.push_back(',');
    append_number(text, row.gamma);
    append_optional(text, row.s_stable);
    append_optional(text, row.s_unstable);
    append_optional(text, row.e_variational);
    append_optional(text, row.s_oracle);
    append_optional(text, row.e_oracle);
    text.push_back(',');
    text += row.regime;
    text.push_back('\n');
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw std::runtime_error("failed to write CSV output");
}

std::vector<SweepRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header)
    throw std::invalid_argument("csv: missing or unexpected header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    const auto f = split(line);
    if (f.size() != 8) throw std::invalid_argument("csv: expected 8 fields, got " + std::to_string(f.size()));
    SweepRow row;
    row.n_atoms = parse_field(f[0]);
    row.gamma = parse_field(f[1]);
    row.s_stable = parse_optional(f[2]);
    row.s_unstable = parse_optional(f[3]);
    row.e_variational = parse_optional(f[4]);
    row.s_oracle = parse_optional(f[5]);
    row.e_oracle = parse_optional(f[6]);
    row.regime = std::string(f[7]);
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace bec
