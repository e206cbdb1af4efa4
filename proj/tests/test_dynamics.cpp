#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "doctest.h"
#include "rotbound/constraint_set.hpp"
#include "rotbound/dynamics.hpp"
#include "rotbound/minimize.hpp"
#include "rotbound/modes.hpp"
#include "support.hpp"

using namespace rotbound;

namespace {

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// Mixed-mode field: a rotation changes it, so orbit tests are not vacuous.
WaveField two_mode(const Grid& g) { return two_mode_seed(g, Constraints{1.0, 0.6}, 0, 2); }

}  // namespace

TEST_CASE("a Strang step preserves mass") {
  const Grid g = make_grid(64, 8.0);
  const PhysicsParams p;
  WaveField f = two_mode(g);
  f.axpy(0.3, testing::gaussian(g, 0.7, 1.0, -0.5));
  const WaveField s = step_strang(f, 1e-3, p);
  CHECK(std::abs(mass(s) - mass(f)) < 1e-12 * mass(f));
}

TEST_CASE("free evolution of a Gaussian follows the closed form") {
  const Grid g = make_grid(128, 8.0);
  PhysicsParams p;
  p.lambda = 0.0;
  p.trap = 0.0;
  const StrangStepper stepper(g, 1e-3, p);
  WaveField f = testing::gaussian(g);
  for (int s = 0; s < 100; ++s) stepper.step(f);
  const cplx w(1.0, 0.1);  // 1 + i t at t = 0.1
  double err = 0.0;
  for (int a = 0; a < g.n; ++a) {
    for (int b = 0; b < g.n; ++b) {
      const double r2 = g.coord(a) * g.coord(a) + g.coord(b) * g.coord(b);
      err = std::max(err, std::abs(f.at(a, b) - std::exp(-0.5 * r2 / w) / w));
    }
  }
  CHECK(err < 1e-6);
}

TEST_CASE("linear flow keeps a single angular mode") {
  // L_z commutes with the flow only up to the grid error, which falls fast under refinement.
  PhysicsParams p;
  p.lambda = 0.0;
  auto run = [&](int n) {
    const EvolveTrace t = evolve(mode_component(make_grid(n, 6.0), 2, 1.0), p, EvolveOptions{0.5, 1e-3, 100});
    CHECK(max_of(t.mass_drift) < 1e-12);
    return std::pair{to_modes(t.final_field, 8).fraction_outside(2), max_of(t.angmom_drift)};
  };
  const auto [leak64, drift64] = run(64);
  const auto [leak128, drift128] = run(128);
  CHECK(leak128 < 1e-8);
  CHECK(drift128 < 1e-7);
  CHECK(leak128 < 1e-3 * leak64);
  CHECK(drift128 < 1e-3 * drift64);
}

TEST_CASE("orbit distance recovers phase and rotation") {
  const Grid g = make_grid(64, 8.0);
  const PhysicsParams p;
  const WaveField phi = two_mode(g);
  const OrbitMetric metric(phi, p);
  CHECK(metric.distance(phi) < 1e-10);

  // R_alpha multiplies mode n by e^{i n alpha}; built here from the components.
  const double theta0 = -2.3;
  const MassSplit s = mass_split(Constraints{1.0, 0.6}, 0, 2);
  for (double alpha0 : {1.1, 2.9, -0.4, -2.2}) {
    WaveField manual = mode_component(g, 0, s.m1);
    manual.axpy(std::polar(1.0, 2.0 * alpha0), mode_component(g, 2, s.m2));
    WaveField diff = metric.rotated(alpha0);
    diff -= manual;
    CHECK(l2_norm(diff) < 1e-9);

    const WaveField u = std::polar(1.0, theta0) * manual;
    const auto m = metric.match(u);
    CHECK(m.distance < 1e-6);
    CHECK(std::abs(std::remainder(2.0 * (m.alpha - alpha0), 2.0 * std::numbers::pi)) < 1e-6);
  }
}

TEST_CASE("orbit distance of a small perturbation") {
  const Grid g = make_grid(64, 8.0);
  const PhysicsParams p;
  const WaveField phi = two_mode(g);
  const double eps = 1e-3;
  const WaveField h = random_perturbation(g, p, eps, 5);
  CHECK(h1_norm(h, p) == doctest::Approx(eps).epsilon(1e-12));
  const double d = orbit_distance(phi + h, OrbitReference{phi, {}, {}}, p);
  CHECK(d <= eps * (1.0 + 1e-9));
  CHECK(d >= 0.1 * eps);
}

TEST_CASE("orbit distance is invariant under the symmetry group") {
  const Grid g = make_grid(64, 8.0);
  const PhysicsParams p;
  const WaveField phi = two_mode(g);
  const OrbitReference ref{phi, {}, {}};
  const OrbitMetric metric(phi, p);
  const WaveField moved = std::polar(1.0, 0.4) * metric.rotated(2.0);
  const EvolveOptions o{0.05, 1e-3, 10};
  const EvolveTrace a = evolve(phi, p, o, &ref);
  const EvolveTrace b = evolve(moved, p, o, &ref);
  REQUIRE(a.orbit_distance.size() == b.orbit_distance.size());
  for (std::size_t i = 0; i < a.orbit_distance.size(); ++i) {
    CHECK(std::abs(a.orbit_distance[i] - b.orbit_distance[i]) < 1e-8);
  }
}

TEST_CASE("energy drift is second order for a non-stationary state") {
  const Grid g = make_grid(64, 8.0);
  const PhysicsParams p;
  const WaveField f = testing::gaussian(g, 0.8, 1.0, 0.5);
  const double e1 = max_of(evolve(f, p, EvolveOptions{1.0, 1e-2, 10}).energy_drift);
  const double e2 = max_of(evolve(f, p, EvolveOptions{1.0, 5e-3, 20}).energy_drift);
  const double ratio = e1 / e2;
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.0);
}

TEST_CASE("a converged minimizer stays on its orbit") {
  const Grid g = make_grid(64, 8.0);
  const PhysicsParams p;
  SolveOptions o;
  o.keep_history = false;
  const MinimizeReport r = minimize_doubly(p, g, Constraints{1.0, 0.5}, o);
  REQUIRE(r.converged);
  const OrbitReference ref{r.field, r.multipliers, Constraints{1.0, 0.5}};
  const StabilityReport s = stability_experiment(ref, 0.0, p, EvolveOptions{2.0, 1e-3, 100}, 1);
  CHECK(s.sup_distance < 1e-4);
  CHECK(max_of(s.trace.mass_drift) < 1e-12);
  CHECK(max_of(s.trace.energy_drift) < 1e-6);
  CHECK(max_of(s.trace.angmom_drift) < 1e-5);
}

TEST_CASE("evolve validates its inputs") {
  const Grid g = make_grid(32, 6.0);
  const PhysicsParams p;
  const WaveField f = testing::gaussian(g);
  CHECK_THROWS_AS(evolve(f, p, EvolveOptions{1.0, 2e-2, 1}), InvalidArgument);
  CHECK_THROWS_AS(evolve(f, p, EvolveOptions{0.0, 1e-3, 1}), InvalidArgument);
  CHECK_THROWS_AS(evolve(f, p, EvolveOptions{1.0, 1e-3, 0}), InvalidArgument);
  WaveField bad = f;
  bad[3] = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_AS(evolve(bad, p, EvolveOptions{1.0, 1e-3, 1}), InvalidArgument);
}

TEST_CASE("strongly focusing parameters are rejected or blow up") {
  PhysicsParams p;
  p.lambda = -200.0;
  p.sigma = 1.0;
  CHECK_THROWS_AS(validate(p), ValidationError);
  // Bypassing validation, a concentrated focusing state must not pass silently.
  const Grid g = make_grid(64, 4.0);
  WaveField f = testing::gaussian(g, 0.3);
  f *= 30.0;
  bool flagged = false;
  try {
    const EvolveTrace t = evolve(f, p, EvolveOptions{0.2, 1e-4, 10});
    flagged = max_of(t.energy_drift) > 1e-3;
  } catch (const BlowUp&) {
    flagged = true;
  }
  CHECK(flagged);
}

TEST_CASE("perturbations are reproducible") {
  const Grid g = make_grid(32, 6.0);
  const PhysicsParams p;
  const WaveField a = random_perturbation(g, p, 1e-2, 77);
  const WaveField b = random_perturbation(g, p, 1e-2, 77);
  const WaveField c = random_perturbation(g, p, 1e-2, 78);
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i] == b[i];
  CHECK(same);
  WaveField d = a;
  d -= c;
  CHECK(l2_norm(d) > 1e-4);
  CHECK(l2_norm(random_perturbation(g, p, 0.0, 1)) == 0.0);
}
