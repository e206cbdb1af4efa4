#include <cmath>

#include "doctest.h"
#include "rotbound/constraint_set.hpp"
#include "rotbound/minimize.hpp"
#include "rotbound/modes.hpp"
#include "support.hpp"

using namespace rotbound;

namespace {

// Coarser than the desk grid so that the suite stays quick.
const Grid& small_grid() {
  static const Grid g = make_grid(64, 8.0);
  return g;
}

SolveOptions quick() {
  SolveOptions o;
  o.keep_history = true;
  return o;
}

}  // namespace

TEST_CASE("l = 0 minimizer is radial and matches the mass-only ground state") {
  const PhysicsParams p;
  const MinimizeReport r = minimize_doubly(p, small_grid(), Constraints{1.0, 0.0}, quick());
  REQUIRE(r.converged);
  CHECK(r.residual < 1e-4);
  CHECK(r.identity_gap < 1e-5);
  CHECK(to_modes(r.field, 8).fraction_outside(0) < 1e-6);
  const MinimizeReport g = minimize_mass_only(p, small_grid(), 1.0, 0.0, quick());
  REQUIRE(g.converged);
  CHECK(std::abs(r.energy_value - g.energy_value) < 1e-6 * g.energy_value);
  CHECK(std::abs(g.angular_momentum) < 1e-8);
}

TEST_CASE("l = 1 minimizer is stationary") {
  const PhysicsParams p;
  const MinimizeReport r = minimize_doubly(p, small_grid(), Constraints{1.0, 1.0}, quick());
  REQUIRE(r.converged);
  CHECK(r.residual < 1e-4);
  CHECK(r.identity_gap < 1e-5);
  CHECK(std::abs(mass(r.field) - 1.0) < 1e-10);
  CHECK(std::abs(angular_momentum(r.field) - 1.0) < 1e-8);
}

TEST_CASE("descent history is monotone and stays on the constraint set") {
  const PhysicsParams p;
  const MinimizeReport r = minimize_doubly(p, small_grid(), Constraints{1.0, 0.5}, quick());
  REQUIRE(r.converged);
  REQUIRE(r.history.size() >= 2);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    const auto& h = r.history[i];
    CHECK(h.energy <= r.history[i - 1].energy + 1e-12 * std::abs(h.energy));
    CHECK(h.mass_err < 1e-10);
    CHECK(h.angmom_err < 1e-8 * std::max(1.0, 0.5));
  }
  CHECK_FALSE(r.multipliers.degenerate);
  CHECK(r.residual < 1e-4);
  // Both stopping criteria agree: the recorded ratio residual / grad_norm stays O(1).
  CHECK(r.residual_ratio < 10.0);
}

TEST_CASE("minimizers of opposite momenta have equal energy") {
  const PhysicsParams p;
  const MinimizeReport a = minimize_doubly(p, small_grid(), Constraints{1.0, 0.75}, quick());
  const MinimizeReport b = minimize_doubly(p, small_grid(), Constraints{1.0, -0.75}, quick());
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(std::abs(a.energy_value - b.energy_value) < 2e-6 * a.energy_value);
  const WaveField t = reflect_x1(a.field);
  CHECK(std::abs(energy(t, p) - a.energy_value) < 1e-12 * a.energy_value);
  CHECK(std::abs(angular_momentum(t) + 0.75) < 1e-8);
}

TEST_CASE("solves are deterministic") {
  const PhysicsParams p;
  SolveOptions o = quick();
  o.max_iters = 30;
  const MinimizeReport a = minimize_doubly(p, small_grid(), Constraints{1.0, 0.3}, o);
  const MinimizeReport b = minimize_doubly(p, small_grid(), Constraints{1.0, 0.3}, o);
  CHECK(a.energy_value == b.energy_value);
  CHECK(a.seed_used == b.seed_used);
}

TEST_CASE("radial seeds cannot carry angular momentum") {
  const PhysicsParams p;
  SolveOptions o = quick();
  o.seeds = {{0, 0}};
  CHECK_THROWS_AS(minimize_doubly(p, small_grid(), Constraints{1.0, 0.5}, o), NoFeasibleSeed);
}

TEST_CASE("seeds for negative momentum are mirrored") {
  const SolveOptions o = quick();
  const auto plus = seed_field(small_grid(), Constraints{1.0, 0.4}, SeedPair{0, 1}, o, 0);
  const auto minus = seed_field(small_grid(), Constraints{1.0, -0.4}, SeedPair{0, 1}, o, 0);
  REQUIRE(plus);
  REQUIRE(minus);
  CHECK(std::abs(mass(*minus) - 1.0) < 1e-10);
  CHECK(std::abs(angular_momentum(*minus) + 0.4) < 1e-8);
  CHECK(std::abs(angular_momentum(*plus) - 0.4) < 1e-8);
  CHECK_FALSE(seed_field(small_grid(), Constraints{1.0, 1.5}, SeedPair{0, 1}, o, 0));
}

TEST_CASE("rotating ground state has the sign of Omega") {
  const PhysicsParams p;
  const MinimizeReport g = minimize_mass_only(p, small_grid(), 1.0, 0.5, quick());
  REQUIRE(g.converged);
  CHECK(0.5 * g.angular_momentum >= -1e-8);
  CHECK(std::abs(mass(g.field) - 1.0) < 1e-12);
}

TEST_CASE("legendre check on a synthetic curve") {
  EnergyCurve c;
  c.m = 1.0;
  for (int i = -4; i <= 4; ++i) {
    const double l = 0.25 * i;
    c.l_values.push_back(l);
    c.e_values.push_back(1.0 + l * l);
  }
  // min over l >= 0 of 1 + l^2 - l is 0.75 at l = 0.5.
  const LegendreReport r = legendre_check(c, 0.75, 1.0);
  CHECK(r.gap == doctest::Approx(0.0));
  CHECK(r.argmin_l == doctest::Approx(0.5));
  CHECK(r.inequality_violations == 0);
  const LegendreReport too_high = legendre_check(c, 0.95, 1.0);
  CHECK(too_high.inequality_violations == 3);
  CHECK_THROWS_AS(legendre_check(EnergyCurve{}, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("solver option validation") {
  SolveOptions o;
  CHECK_NOTHROW(validate(o));
  o.tol_grad = 0.0;
  CHECK_THROWS_AS(validate(o), ValidationError);
  o = SolveOptions{};
  o.seed_admixture = 1.0;
  CHECK_THROWS_AS(validate(o), ValidationError);
  o = SolveOptions{};
  o.max_iters = 0;
  CHECK_THROWS_AS(validate(o), ValidationError);
}
