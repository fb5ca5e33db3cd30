#include "bec/gpe_oracle.hpp"

#include <cmath>
#include <deque>
#include <ostream>
#include <stdexcept>
#include <string>

namespace bec {

void GridSpec::validate() const {
  if (n_points < 64) throw std::invalid_argument("grid needs at least 64 points");
  if (!(r_max >= 6.0) || !std::isfinite(r_max))
    throw std::invalid_argument("grid extent r_max must be at least 6 oscillator lengths");
}

std::size_t GridSpec::size() const {
  return dimension == GridKind::D1 ? 2 * static_cast<std::size_t>(n_points) - 1
                                   : static_cast<std::size_t>(n_points);
}

double GridSpec::coordinate(std::size_t i) const {
  const double h = spacing();
  if (dimension == GridKind::D1) return (static_cast<double>(i) - (n_points - 1)) * h;
  return static_cast<double>(i) * h;
}

namespace {

// The solver works on w, normalised as h * sum w^2 = 1: w = sqrt(4 pi) u in
// D3Radial and w = phi in D1. In these variables
//   e_kin = -1/2 sum w (D2 w) h  (three-point second difference D2),  e_pot = 1/2 sum x^2 w^2 h,
//   e_int = gamma/2 sum w^4 / r^2 h  (3D)   or   gamma sum w^4 h  (1D).
double storage_scale(GridKind kind) {
  return kind == GridKind::D3Radial ? std::sqrt(4.0 * constants::pi) : 1.0;
}

struct Discretization {
  GridKind kind;
  double h;
  double gamma;
  std::vector<double> x2;      // coordinate squared
  std::vector<double> inv_r2;  // 3D only; zero at r = 0

  Discretization(const GridSpec& spec, double gamma_total)
      : kind(spec.dimension), h(spec.spacing()), gamma(gamma_total) {
    const std::size_t n = spec.size();
    x2.resize(n);
    inv_r2.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = spec.coordinate(i);
      x2[i] = x * x;
      if (kind == GridKind::D3Radial && i > 0) inv_r2[i] = 1.0 / x2[i];
    }
  }

  double norm(const std::vector<double>& w) const {
    double acc = 0.0;
    for (double v : w) acc += v * v;
    return acc * h;
  }

  // Mean-field potential: gradient of e_int divided by w.
  double mean_field(const std::vector<double>& w, std::size_t i) const {
    const double w2 = w[i] * w[i];
    return kind == GridKind::D3Radial ? 2.0 * gamma * w2 * inv_r2[i] : 4.0 * gamma * w2;
  }

  EnergyBreakdown energy(const std::vector<double>& w) const {
    const std::size_t n = w.size();
    double kin = 0.0, pot = 0.0, inter = 0.0;
    // -sum w_i (w_{i+1} - 2 w_i + w_{i-1}) equals sum (w_{i+1} - w_i)^2 when
    // both ends vanish; the sum of squares avoids the cancellation.
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double d = w[i + 1] - w[i];
      kin += d * d;
    }
    kin /= h * h;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      pot += x2[i] * w[i] * w[i];
      const double w4 = w[i] * w[i] * w[i] * w[i];
      inter += kind == GridKind::D3Radial ? w4 * inv_r2[i] : w4;
    }
    EnergyBreakdown e;
    e.kinetic = 0.5 * kin * h;
    e.potential = 0.5 * pot * h;
    e.interaction = (kind == GridKind::D3Radial ? 0.5 : 1.0) * gamma * inter * h;
    e.total = e.kinetic + e.potential + e.interaction;
    return e;
  }

  double second_moment(const std::vector<double>& w) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += x2[i] * w[i] * w[i];
    return acc * h;
  }

  double width(const std::vector<double>& w) const {
    const double m2 = second_moment(w) / norm(w);
    return kind == GridKind::D3Radial ? std::sqrt(2.0 * m2 / 3.0) : std::sqrt(2.0 * m2);
  }

  // One backward-Euler step with frozen mean field. Returns false if the
  // tridiagonal system loses positivity.
  bool implicit_step(const std::vector<double>& w, double tau, std::vector<double>& out,
                     std::vector<double>& scratch) const {
    const std::size_t n = w.size();
    out.assign(n, 0.0);
    scratch.assign(n, 0.0);
    const double off = -tau / (h * h);
    // Thomas algorithm over interior nodes 1..n-2.
    double prev_c = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double diag = 1.0 + tau * (2.0 / (h * h) + x2[i] + mean_field(w, i));
      const double denom = diag - (i > 1 ? off * prev_c : 0.0);
      if (!(denom > 0.0)) return false;
      const double c = (i + 2 < n) ? off / denom : 0.0;
      scratch[i] = c;
      out[i] = (w[i] - (i > 1 ? off * out[i - 1] : 0.0)) / denom;
      prev_c = c;
    }
    for (std::size_t i = n - 2; i >= 2; --i) out[i - 1] -= scratch[i - 1] * out[i];
    return true;
  }
};

std::vector<double> to_solver(const GridState& state) {
  const double scale = storage_scale(state.spec.dimension);
  std::vector<double> w(state.values);
  for (double& v : w) v *= scale;
  return w;
}

std::vector<double> from_solver(const std::vector<double>& w, GridKind kind) {
  const double scale = 1.0 / storage_scale(kind);
  std::vector<double> values(w);
  for (double& v : values) v *= scale;
  return values;
}

void normalize(std::vector<double>& w, double h) {
  double acc = 0.0;
  for (double v : w) acc += v * v;
  const double inv = 1.0 / std::sqrt(acc * h);
  for (double& v : w) v *= inv;
}

void check_shape(const GridState& state) {
  state.spec.validate();
  if (state.values.size() != state.spec.size())
    throw std::invalid_argument("grid state size does not match its grid");
}

constexpr double norm_tolerance = 1e-10;
// Rounding allowance when comparing energies of successive iterates.
constexpr double energy_slack = 1e-13;

} // namespace

double grid_norm(const GridState& state) {
  check_shape(state);
  const Discretization disc(state.spec, state.gamma_total);
  return disc.norm(to_solver(state));
}

EnergyBreakdown discrete_energy(const GridState& state) {
  check_shape(state);
  const Discretization disc(state.spec, state.gamma_total);
  const std::vector<double> w = to_solver(state);
  if (std::abs(disc.norm(w) - 1.0) > norm_tolerance)
    throw std::invalid_argument("grid state is not normalised");
  return disc.energy(w);
}

GridState gaussian_state(const GridSpec& spec, double s, double gamma) {
  spec.validate();
  if (!(s > 0.0)) throw std::invalid_argument("Gaussian width must be positive");
  GridState state;
  state.spec = spec;
  state.gamma_total = gamma;
  const std::size_t n = spec.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double x = spec.coordinate(i);
    const double g = std::exp(-x * x / (2.0 * s * s));
    w[i] = spec.dimension == GridKind::D3Radial ? x * g : g;
  }
  normalize(w, spec.spacing());
  state.values = from_solver(w, spec.dimension);
  state.energy = Discretization(spec, gamma).energy(w);
  return state;
}

GridState minimize(const GridSpec& spec, double gamma, const std::optional<GridState>& init,
                   const MinimizeOptions& options) {
  spec.validate();
  if (!std::isfinite(gamma)) throw std::invalid_argument("coupling must be finite");
  const Discretization disc(spec, gamma);

  std::vector<double> w;
  if (init) {
    if (init->spec.dimension != spec.dimension || init->values.size() != spec.size())
      throw std::invalid_argument("initial state does not match the grid");
    w = to_solver(*init);
    w.front() = w.back() = 0.0;
    normalize(w, disc.h);
  } else {
    w = to_solver(gaussian_state(spec, 1.0, gamma));
  }

  GridState out;
  out.spec = spec;
  out.gamma_total = gamma;

  const double h = disc.h;
  const double max_step = options.initial_step * options.max_step_factor;
  const double min_step = options.initial_step * 1e-12;
  double tau = options.initial_step;
  int streak = 0;
  EnergyBreakdown e = disc.energy(w);
  std::deque<double> history{e.total};
  std::vector<double> trial, scratch;

  long it = 0;
  while (it < options.max_iterations) {
    ++it;
    bool accepted = false;
    EnergyBreakdown e_trial = e;
    if (disc.implicit_step(w, tau, trial, scratch)) {
      normalize(trial, h);
      e_trial = disc.energy(trial);
      accepted = std::isfinite(e_trial.total) && e_trial.total <= e.total + energy_slack;
    }
    IterationInfo info;
    info.iteration = it;
    info.accepted = accepted;
    info.step = tau;
    info.energy_before = e.total;
    if (accepted) {
      w.swap(trial);
      e = e_trial;
      if (++streak >= options.grow_after) {
        tau = std::min(2.0 * tau, max_step);
        streak = 0;
      }
    } else {
      tau *= 0.5;
      streak = 0;
    }
    info.energy_after = e.total;
    if (options.observer) {
      info.norm = disc.norm(w);
      options.observer(info);
    }

    if (accepted) {
      if (gamma < 0.0 && (disc.width(w) < 4.0 * h || e.total < -1e3)) {
        out.collapsed = true;
        break;
      }
      history.push_back(e.total);
      if (static_cast<int>(history.size()) > options.window) {
        history.pop_front();
        if (std::abs(e.total - history.front()) <= options.tolerance * std::abs(e.total)) {
          out.converged = true;
          break;
        }
      }
    } else if (tau < min_step) {
      // No step of any size lowers the energy beyond rounding: the state is
      // stationary to machine precision.
      out.converged = true;
      break;
    }
  }

  out.values = from_solver(w, spec.dimension);
  out.energy = e;
  out.iterations = it;
  return out;
}

double rms_width(const GridState& state) {
  check_shape(state);
  const Discretization disc(state.spec, state.gamma_total);
  return disc.width(to_solver(state));
}

double measured_width(const GridState& state) {
  if (state.collapsed) throw std::invalid_argument("width of a collapsed state is undefined");
  if (state.iterations > 0 && !state.converged)
    throw std::invalid_argument("width of an unconverged state is undefined");
  return rms_width(state);
}

double critical_scan(const GridSpec& spec, double gamma_lo, double gamma_hi, double width,
                     const MinimizeOptions& options) {
  if (!(gamma_lo < gamma_hi) || !(gamma_hi < 0.0))
    throw std::invalid_argument("critical scan needs gamma_lo < gamma_hi < 0");
  if (!(width > 0.0)) throw std::invalid_argument("scan width must be positive");
  auto collapses = [&](double g) { return minimize(spec, g, std::nullopt, options).collapsed; };
  const bool lo_collapses = collapses(gamma_lo);
  const bool hi_collapses = collapses(gamma_hi);
  if (lo_collapses == hi_collapses)
    throw std::invalid_argument(std::string("critical scan bracket endpoints both ") +
                                (lo_collapses ? "collapse" : "remain stable"));
  if (!lo_collapses) throw std::invalid_argument("critical scan expects gamma_lo to collapse");
  while (gamma_hi - gamma_lo > width) {
    const double mid = 0.5 * (gamma_lo + gamma_hi);
    if (collapses(mid)) gamma_lo = mid;
    else gamma_hi = mid;
  }
  return 0.5 * (gamma_lo + gamma_hi);
}

void write_density_csv(const GridState& state, std::ostream& out) {
  check_shape(state);
  const auto& spec = state.spec;
  out << (spec.dimension == GridKind::D1 ? "x" : "r") << ",density\n";
  out.precision(17);
  const std::size_t n = spec.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = spec.coordinate(i);
    double phi = 0.0;
    if (spec.dimension == GridKind::D1) {
      phi = state.values[i];
    } else if (i > 0) {
      phi = state.values[i] / x;
    } else {
      // phi is even in r: phi(0) = (4 phi(h) - phi(2h)) / 3 to second order.
      const double h = spec.spacing();
      phi = (4.0 * state.values[1] / h - state.values[2] / (2.0 * h)) / 3.0;
    }
    out << x << ',' << phi * phi << '\n';
  }
}

} // namespace bec
