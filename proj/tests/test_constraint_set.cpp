#include <cmath>
#include <random>

#include "doctest.h"
#include "rotbound/constraint_set.hpp"
#include "rotbound/modes.hpp"
#include "rotbound/spectral.hpp"
#include "support.hpp"

using namespace rotbound;

TEST_CASE("closed-form mass split") {
  const MassSplit s = mass_split(Constraints{1.0, 0.5}, 0, 1);
  CHECK(s.m1 == doctest::Approx(0.5));
  CHECK(s.m2 == doctest::Approx(0.5));
  const MassSplit t = mass_split(Constraints{2.0, -1.0}, -1, 2);
  CHECK(t.m1 + t.m2 == doctest::Approx(2.0));
  CHECK(-t.m1 + 2.0 * t.m2 == doctest::Approx(-1.0));
}

TEST_CASE("mass split outside the support is rejected") {
  CHECK_THROWS_AS(mass_split(Constraints{1.0, 2.5}, 0, 2), MassSplitNegative);
  CHECK_THROWS_AS(mass_split(Constraints{1.0, -0.1}, 0, 1), MassSplitNegative);
  CHECK_THROWS_AS(mass_split(Constraints{1.0, 1.0}, 1, 2), MassSplitNegative);
  CHECK_THROWS_AS(mass_split(Constraints{1.0, 1.0}, 1, 1), InvalidArgument);
}

TEST_CASE("two-mode seeds sit on the constraint set") {
  const Grid g = make_grid(128, 8.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (const auto& [n1, n2] : {std::pair{-1, 1}, std::pair{0, 2}, std::pair{-3, 2}, std::pair{1, 3}}) {
    const double m = 0.5 + u(rng);
    const double l = m * (n1 + (n2 - n1) * u(rng));
    const WaveField f = two_mode_seed(g, Constraints{m, l}, n1, n2);
    CHECK(std::abs(mass(f) - m) < 1e-12 * m);
    CHECK(std::abs(angular_momentum(f) - l) < 1e-10 * std::max(1.0, std::abs(l)));
    const AngularModes modes = to_modes(f, 8);
    CHECK(modes.mode_mass(n1) + modes.mode_mass(n2) == doctest::Approx(m).epsilon(1e-8));
  }
}

TEST_CASE("mode components are normalized single modes") {
  const Grid g = make_grid(128, 8.0);
  const WaveField f = mode_component(g, -2, 0.7);
  CHECK(mass(f) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(angular_momentum(f) == doctest::Approx(-1.4).epsilon(1e-10));
  CHECK(to_modes(f, 8).fraction_outside(-2) < 1e-12);
}

TEST_CASE("feasibility of mode profiles") {
  const std::vector<double> labels = {0.0, 1.0, 2.0};
  const std::vector<double> weights = {0.3, 0.5, 0.2};
  CHECK(feasibility(labels, weights, Constraints{1.0, 1.5}).ok());
  CHECK(feasibility(labels, weights, Constraints{1.0, 2.5}).status == FeasibilityStatus::kAboveSupport);
  CHECK(feasibility(labels, weights, Constraints{1.0, -0.5}).status == FeasibilityStatus::kBelowSupport);
  const std::vector<double> none = {0.0, 0.0, 0.0};
  CHECK(feasibility(labels, none, Constraints{1.0, 0.5}).status == FeasibilityStatus::kEmpty);
  const std::vector<double> single = {0.0, 1.0, 0.0};
  CHECK(feasibility(labels, single, Constraints{2.0, 2.0}).ok());
  CHECK_FALSE(feasibility(labels, single, Constraints{2.0, 1.0}).ok());
}

TEST_CASE("tilt hits both moments") {
  const std::vector<double> labels = {-1.0, 0.0, 1.0, 2.0};
  const std::vector<double> weights = {0.1, 0.6, 0.2, 0.1};
  const Constraints c{1.3, 0.9};
  const Tilt t = solve_tilt(labels, weights, c);
  double m = 0.0;
  double l = 0.0;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const double w = weights[j] * std::exp(t.a + t.b * labels[j]);
    m += w;
    l += labels[j] * w;
  }
  CHECK(m == doctest::Approx(1.3).epsilon(1e-13));
  CHECK(l == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("retraction lands on the constraint set exactly") {
  const Grid g = make_grid(128, 8.0);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 4; ++trial) {
    WaveField f = testing::random_smooth(g, rng);
    f.axpy(0.4, testing::vortex(g, 1));
    const double l = 0.1 + 0.2 * trial;
    RetractInfo info;
    const WaveField r = retract(f, Constraints{1.0, l}, {}, &info);
    CHECK(std::abs(mass(r) - 1.0) < 1e-10);
    CHECK(std::abs(angular_momentum(r) - l) < 1e-8);
    CHECK(info.krylov_dim >= 4);
  }
}

TEST_CASE("retraction keeps points already on the set") {
  const Grid g = make_grid(128, 8.0);
  const WaveField f = two_mode_seed(g, Constraints{1.0, 0.5}, 0, 1);
  const WaveField r = retract(f, Constraints{1.0, 0.5});
  WaveField d = r;
  d -= f;
  CHECK(l2_norm(d) < 1e-10);
}

TEST_CASE("retraction reports unreachable momentum") {
  const Grid g = make_grid(64, 8.0);
  const WaveField f = testing::gaussian(g);
  CHECK_THROWS_AS(retract(f, Constraints{1.0, 0.5}), ConstraintInfeasible);
}

TEST_CASE("tangent projection is orthogonal to f and L_z f") {
  const Grid g = make_grid(64, 8.0);
  std::mt19937_64 rng(6);
  WaveField f = testing::random_smooth(g, rng);
  f.axpy(0.5, testing::vortex(g, 2));
  const WaveField h = testing::random_smooth(g, rng);
  const WaveField lf = apply_Lz(f);
  const WaveField t = tangent_project(h, f, lf);
  CHECK(std::abs(inner_product(f, t).real()) < 1e-12 * l2_norm(h) * l2_norm(f));
  CHECK(std::abs(inner_product(lf, t).real()) < 1e-12 * l2_norm(h) * l2_norm(lf));
  const WaveField again = tangent_project(t, f);
  WaveField d = again;
  d -= t;
  CHECK(l2_norm(d) < 1e-12 * l2_norm(t));
}
