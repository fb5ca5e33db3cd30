#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "bec/variational.hpp"
#include "oracles.hpp"

using namespace bec;

namespace {

const double sqrt_2pi = std::sqrt(2.0 * constants::pi);
const double eps = std::numeric_limits<double>::epsilon();

DimensionlessProblem d3(double g) { return {Dimension::D3, g}; }
DimensionlessProblem d1(double g) { return {Dimension::D1, g}; }

PhysicalSetup lithium(double freq = 120.0) { return make_setup_3d(7.016, freq, -14.5e-10, 0); }

// |de/ds| at a root is bounded by the curvature times the spacing of
// representable widths; below s ~ 0.01 that exceeds 1e-10.
double residual_bound(const StationaryPoint& p, const DimensionlessProblem& problem) {
  return std::max(1e-10, 8 * eps * p.s * std::abs(denergy(p.s, problem, 2)));
}

} // namespace

TEST_CASE("energy_1d values") {
  CHECK(energy_1d(1, 0).total == doctest::Approx(0.5).epsilon(1e-16));
  CHECK(energy_1d(2, 0).total == doctest::Approx(1.0625).epsilon(1e-16));
  const EnergyBreakdown e = energy_1d(1, sqrt_2pi);
  CHECK(e.total == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(e.interaction == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e.total == e.kinetic + e.potential + e.interaction);
  CHECK_THROWS_AS(energy_1d(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(energy_1d(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("energy_3d values") {
  CHECK(energy_3d(1, 0).total == 1.5);
  CHECK(energy_1d(1, 0).total == 0.5);
  CHECK(energy_3d(1, sqrt_2pi).total == doctest::Approx(2.5).epsilon(1e-15));
  CHECK_THROWS_AS(energy_3d(0.0, 0.0), std::invalid_argument);
  const EnergyBreakdown attractive = energy_3d(0.7, -0.2);
  CHECK(attractive.kinetic > 0);
  CHECK(attractive.potential > 0);
  CHECK(attractive.interaction < 0);
}

TEST_CASE("energies agree with the dimensional formulas in oscillator units") {
  for (double s : {0.1, 0.5, 1.0, 2.0, 4.0})
    for (double g : {-3.0, -0.4, 0.0, 0.7, 12.0}) {
      CHECK(energy_3d(s, g).total == doctest::Approx(oracle::gaussian_energy_3d(s, g)).epsilon(1e-13));
      CHECK(energy_1d(s, g).total == doctest::Approx(oracle::gaussian_energy_1d(s, g)).epsilon(1e-13));
    }
}

TEST_CASE("denergy examples") {
  CHECK(denergy(1, d3(0), 1) == 0.0);
  auto e3 = [](double g) { return [g](double s) { return oracle::gaussian_energy_3d(s, g); }; };
  CHECK(denergy(1, d3(0), 2) == doctest::Approx(oracle::fd2(e3(0), 1.0, 1e-3)).epsilon(1e-8));
  CHECK(denergy(0.5, d3(-0.3), 1) == doctest::Approx(oracle::fd1(e3(-0.3), 0.5, 1e-4)).epsilon(1e-8));
  CHECK_THROWS_AS(denergy(1, d3(0), 4), std::invalid_argument);
  CHECK_THROWS_AS(denergy(0, d3(0), 1), std::invalid_argument);
}

TEST_CASE("derivatives match finite differences on random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> width(0.05, 5.0), coupling(-10.0, 10.0);
  for (int k = 0; k < 200; ++k) {
    const double s = width(rng), g = coupling(rng);
    const DimensionlessProblem p = k % 2 ? d1(g) : d3(g);
    auto e = [&](double x) {
      return p.dimension == Dimension::D3 ? oracle::gaussian_energy_3d(x, g) : oracle::gaussian_energy_1d(x, g);
    };
    const double first = denergy(s, p, 1), second = denergy(s, p, 2);
    CHECK(std::abs(first - oracle::fd1(e, s, 1e-3 * s)) <= 1e-7 * std::max(1.0, std::abs(first)));
    CHECK(std::abs(second - oracle::fd2(e, s, 1e-3 * s)) <= 1e-7 * std::max(1.0, std::abs(second)));
    auto d2 = [&](double x) { return denergy(x, p, 2); };
    const double third = denergy(s, p, 3);
    CHECK(std::abs(third - oracle::fd1(d2, s, 1e-3 * s)) <= 1e-6 * std::max(1.0, std::abs(third)));
  }
}

TEST_CASE("stationary points: noninteracting") {
  const StabilityReport r3 = stationary_points(d3(0));
  REQUIRE(r3.points.size() == 1);
  CHECK(r3.regime == Regime::Noninteracting);
  CHECK(r3.points[0].kind == Extremum::Minimum);
  CHECK(std::abs(r3.points[0].s - 1.0) < 1e-12);
  CHECK(std::abs(r3.points[0].energy.total - 1.5) < 1e-12);
  CHECK_FALSE(r3.gamma_critical);

  const StabilityReport r1 = stationary_points(d1(0));
  REQUIRE(r1.points.size() == 1);
  CHECK(std::abs(r1.points[0].s - 1.0) < 1e-12);
  CHECK(std::abs(r1.points[0].energy.total - 0.5) < 1e-12);
}

TEST_CASE("stationary points: 3D attractive below criticality") {
  const StabilityReport r = stationary_points(d3(-0.3));
  CHECK(r.regime == Regime::AttractiveSubcritical);
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0].kind == Extremum::Maximum);
  CHECK(r.points[1].kind == Extremum::Minimum);
  CHECK(r.points[1].s > std::pow(5.0, -0.25));
  CHECK(r.points[1].s < 1.0);

  // Independent dense scan of the finite-difference slope.
  const auto brute = oracle::scan_roots(oracle::slope_3d(-0.3), 1e-3, 3.0, 100000);
  REQUIRE(brute.size() == 2);
  CHECK(r.points[0].s == doctest::Approx(brute[0]).epsilon(1e-9));
  CHECK(r.points[1].s == doctest::Approx(brute[1]).epsilon(1e-9));
  // Roots of s^5 - s = 2 gamma / sqrt(2 pi), 30-digit reference.
  CHECK(r.points[0].s == doctest::Approx(0.240164360928474799).epsilon(1e-13));
  CHECK(r.points[1].s == doctest::Approx(0.928145672152789804).epsilon(1e-13));
  REQUIRE(r.s_min_critical);
  CHECK(*r.s_min_critical == std::pow(5.0, -0.25));
  CHECK(r.stable()->s == r.points[1].s);
  CHECK(r.unstable()->s == r.points[0].s);
}

TEST_CASE("stationary points: collapsed and 1D attractive") {
  const StabilityReport collapsed = stationary_points(d3(-1.0));
  CHECK(collapsed.regime == Regime::AttractiveCollapsed);
  CHECK(collapsed.points.empty());
  CHECK(collapsed.gamma_critical);

  const StabilityReport one = stationary_points(d1(-10));
  CHECK(one.regime == Regime::Attractive1D);
  REQUIRE(one.points.size() == 1);
  CHECK(one.points[0].kind == Extremum::Minimum);
  // Root of s^4 - 2 gamma s / sqrt(2 pi) - 1 = 0.
  CHECK(one.points[0].s == doctest::Approx(0.125300519924429465).epsilon(1e-13));
  CHECK(one.points[0].s == doctest::Approx(sqrt_2pi / 20).epsilon(0.01));
}

TEST_CASE("critical point") {
  const CriticalPoint c = critical_3d();
  CHECK(std::abs(c.s_min - 0.668740304976422024) < 1e-15);
  CHECK(c.gamma_critical == doctest::Approx(0.670513342735703127).epsilon(1e-14));
  CHECK(std::abs(c.gamma_critical + oracle::merged_root_coupling()) < 1e-8);

  // Inflection at criticality: first and second derivatives vanish together.
  auto e = [&](double s) { return oracle::gaussian_energy_3d(s, -c.gamma_critical); };
  CHECK(std::abs(oracle::fd1(e, c.s_min, 1e-4)) < 1e-9);
  CHECK(std::abs(oracle::fd2(e, c.s_min, 1e-3)) < 1e-7);
  CHECK(std::abs(denergy(c.s_min, d3(-c.gamma_critical), 1)) < 1e-14);
  CHECK(std::abs(denergy(c.s_min, d3(-c.gamma_critical), 2)) < 1e-13);
}

TEST_CASE("near-critical couplings") {
  const double gc = critical_3d().gamma_critical;
  const StabilityReport at = stationary_points(d3(-gc));
  CHECK(at.regime == Regime::AttractiveCritical);
  REQUIRE(at.points.size() == 1);
  CHECK(at.points[0].s == critical_3d().s_min);
  CHECK(at.points[0].kind == Extremum::Maximum);
  CHECK(denergy(at.points[0].s, d3(-gc), 3) > 0);
  CHECK(stationary_points(d3(-gc + 5e-10)).regime == Regime::AttractiveCritical);

  const StabilityReport below = stationary_points(d3(-gc * (1 - 1e-7)));
  CHECK(below.regime == Regime::AttractiveSubcritical);
  REQUIRE(below.points.size() == 2);
  CHECK(below.points[0].s < critical_3d().s_min);
  CHECK(below.points[1].s > critical_3d().s_min);

  CHECK(stationary_points(d3(-gc * (1 + 1e-7))).points.empty());
}

TEST_CASE("extreme couplings keep their roots inside the scan") {
  const StabilityReport weak = stationary_points(d3(-1e-6));
  REQUIRE(weak.points.size() == 2);
  CHECK(weak.points[0].s == doctest::Approx(2e-6 / sqrt_2pi).epsilon(1e-6));
  const StabilityReport strong = stationary_points(d1(-1e5));
  REQUIRE(strong.points.size() == 1);
  CHECK(strong.points[0].s == doctest::Approx(sqrt_2pi / 2e5).epsilon(1e-6));
  const StabilityReport huge = stationary_points(d3(1e20));
  REQUIRE(huge.points.size() == 1);
  CHECK(huge.points[0].s > 1e3);
  CHECK_THROWS_AS(stationary_points(d3(NAN)), std::invalid_argument);
}

TEST_CASE("residual and classification on a coupling sweep") {
  for (int k = 0; k <= 400; ++k) {
    const double g = -60.0 + 0.3 * k;
    for (const auto& p : {d1(g), d3(g)}) {
      const StabilityReport r = stationary_points(p);
      for (std::size_t i = 0; i < r.points.size(); ++i) {
        const auto& pt = r.points[i];
        CHECK(pt.residual <= residual_bound(pt, p));
        if (pt.s > 0.02) CHECK(pt.residual < 1e-10);
        const double curv = denergy(pt.s, p, 2);
        CHECK(std::abs(curv) > 1e-12);
        CHECK((pt.kind == Extremum::Minimum) == (curv > 0));
        if (i > 0) CHECK(r.points[i - 1].s < pt.s);
      }
    }
  }
}

TEST_CASE("3D branch count agrees with a dense scan") {
  const double gc = critical_3d().gamma_critical;
  for (int k = 0; k < 12; ++k) {
    const double below = -0.01 - k * (0.99 * gc - 0.01) / 11.0;
    const double above = -1.01 * gc - k * 0.3;
    CHECK(stationary_points(d3(below)).points.size() == 2);
    CHECK(oracle::scan_roots(oracle::slope_3d(below), 1e-3, 3.0, 100000).size() == 2);
    CHECK(stationary_points(d3(above)).points.size() == 0);
    CHECK(oracle::scan_roots(oracle::slope_3d(above), 1e-3, 3.0, 100000).size() == 0);
  }
}

TEST_CASE("1D has a single minimum for every coupling") {
  for (int k = 0; k <= 100; ++k) {
    const double g = -50.0 + k;
    const StabilityReport r = stationary_points(d1(g));
    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].kind == Extremum::Minimum);
  }
}

TEST_CASE("width limits") {
  double prev = 0.0;
  for (double g = 0.0; g <= 100.0; g += 2.5) {
    const double s3 = stationary_points(d3(g)).stable()->s;
    CHECK(s3 > prev);
    prev = s3;
  }
  prev = 0.0;
  for (double g = 0.0; g <= 100.0; g += 2.5) {
    const double s1 = stationary_points(d1(g)).stable()->s;
    CHECK(s1 > prev);
    prev = s1;
  }
  prev = INFINITY;
  for (double g = 0.0; g >= -50.0; g -= 2.5) {
    const double s1 = stationary_points(d1(g)).stable()->s;
    CHECK(s1 < prev);
    prev = s1;
  }
  CHECK(stationary_points(d1(-50)).stable()->s < 0.03);
  CHECK(stationary_points(d1(-50)).stable()->s == doctest::Approx(0.0250662728505538513).epsilon(1e-12));
}

TEST_CASE("reports depend only on the dimensionless coupling") {
  PhysicalSetup a = make_setup_3d(7.016, 120.0, -14.5e-10, 1000);
  PhysicalSetup b = make_setup_3d(87.0, 35.0, 0, 0);
  const double aho_b = derive_scales(b).length_aho;
  b.n_atoms = 250;
  b.scattering_length = reduce(a).gamma_total * aho_b / 250;
  const StabilityReport ra = stationary_points(reduce(a));
  const StabilityReport rb = stationary_points(reduce(b));
  REQUIRE(ra.points.size() == rb.points.size());
  for (std::size_t i = 0; i < ra.points.size(); ++i) {
    CHECK(ra.points[i].s == doctest::Approx(rb.points[i].s).epsilon(1e-13));
    CHECK(ra.points[i].energy.total == doctest::Approx(rb.points[i].energy.total).epsilon(1e-13));
  }
}

TEST_CASE("N(sigma)") {
  const double aho = derive_scales(lithium()).length_aho;
  CHECK(std::abs(n_of_sigma(aho, lithium())) < 1e-9);
  CHECK(std::abs(n_of_sigma(aho, make_setup_1d(7.016, 120, 3e-40, 0))) < 1e-9);

  const PhysicalSetup rb = make_setup_3d(87.0, 100.0, 5.3e-9, 0);
  const double aho_rb = derive_scales(rb).length_aho;
  double prev = -1.0;
  for (double s = 1.0; s < 20.0; s += 0.05) {
    const double n = n_of_sigma(s * aho_rb, rb);
    CHECK(n > prev);
    prev = n;
  }
  CHECK(prev > 1e6);

  const MaxAtomNumber nmax = n_max_physical(lithium());
  CHECK(n_of_sigma(critical_3d().s_min * aho, lithium()) == doctest::Approx(nmax.direct).epsilon(1e-12));

  // SI formula against its dimensionless twin.
  for (double s : {0.3, 0.6, 0.9}) {
    const double n = n_of_sigma(s * aho, lithium());
    CHECK(n == doctest::Approx(n_from_gamma(gamma_at_width(s, Dimension::D3), lithium())).epsilon(1e-12));
  }
  // Wider than a_ho no attractive atom number is stationary.
  CHECK(n_of_sigma(1.7 * aho, lithium()) < 0);
  PhysicalSetup free = lithium();
  free.scattering_length = 0.0;
  CHECK_THROWS_AS(n_of_sigma(aho, free), std::invalid_argument);
}

TEST_CASE("critical atom number") {
  const MaxAtomNumber li = n_max_physical(lithium());
  CHECK_FALSE(li.unbounded);
  CHECK(li.direct == doctest::Approx(1602.24013561522970).epsilon(1e-12));
  CHECK(std::abs(li.direct - li.via_gamma) <= 1e-10 * li.direct);
  CHECK(li.floor() == 1602);
  CHECK(li.sigma_min == doctest::Approx(0.668740304976422 * 3.46487988913568866e-6).epsilon(1e-12));

  CHECK(n_max_physical(make_setup_1d(7.016, 120, -1e-40, 0)).unbounded);
  CHECK(n_max_physical(make_setup_3d(7.016, 120, 14.5e-10, 0)).unbounded);
  CHECK(std::isinf(n_max_physical(make_setup_1d(7.016, 120, -1e-40, 0)).floor()));
  CHECK(n_max_physical(make_setup_1d(7.016, 120, -1e-40, 0)).sigma_min == 0.0);

  PhysicalSetup n_is_ignored = lithium();
  n_is_ignored.n_atoms = 1e6;
  CHECK(n_max_physical(n_is_ignored).direct == li.direct);
}

TEST_CASE("total energy in joules") {
  const OscillatorScales sc = derive_scales(lithium());
  CHECK(total_energy_joules(energy_3d(1, 0), 100, sc) == doctest::Approx(150 * sc.energy_hw).epsilon(1e-15));
}
