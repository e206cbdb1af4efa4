#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rotbound/functionals.hpp"
#include "rotbound/spectral.hpp"
#include "support.hpp"

using namespace rotbound;
using testing::gaussian;
using testing::vortex;

namespace {

constexpr double kPi = std::numbers::pi;

PhysicsParams linear_quartic() {
  PhysicsParams p;
  p.lambda = 0.0;
  p.k = 4.0;
  return p;
}

}  // namespace

TEST_CASE("Gaussian closed forms") {
  const Grid g = make_grid(256, 8.0);
  const WaveField f = gaussian(g);
  CHECK(std::abs(mass(f) - kPi) < 1e-12);
  CHECK(std::abs(energy(f, linear_quartic()) - 2.5 * kPi) < 1e-9);
  PhysicsParams cubic;
  CHECK(std::abs(energy(f, cubic) - energy(f, linear_quartic()) - 0.25 * kPi) < 1e-10);
  CHECK(std::abs(potential_energy(f, linear_quartic()) - 2.0 * kPi) < 1e-9);
  CHECK(std::abs(nonlinear_moment(f, 1.0) - 0.5 * kPi) < 1e-12);
}

TEST_CASE("Euler-Lagrange operator on a Gaussian") {
  const Grid g = make_grid(128, 8.0);
  const WaveField f = gaussian(g);
  const WaveField r = euler_lagrange_apply(f, linear_quartic());
  double err = 0.0;
  for (int a = 0; a < g.n; ++a) {
    for (int b = 0; b < g.n; ++b) {
      const double r2 = g.coord(a) * g.coord(a) + g.coord(b) * g.coord(b);
      err = std::max(err, std::abs(r.at(a, b) - (1.0 - 0.5 * r2 + r2 * r2) * f.at(a, b)));
    }
  }
  CHECK(err < 1e-6);

  PhysicsParams cubic;
  WaveField diff = euler_lagrange_apply(f, cubic);
  diff -= r;
  double add = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) add = std::max(add, std::abs(diff[i] - std::norm(f[i]) * f[i]));
  CHECK(add < 1e-14);

  const WaveField zero(g);
  CHECK(l2_norm(euler_lagrange_apply(zero, cubic)) == 0.0);
}

TEST_CASE("directional derivative matches the gradient") {
  const Grid g = make_grid(64, 8.0);
  std::mt19937_64 rng(21);
  PhysicsParams p;
  p.sigma = 1.5;
  const double h = 1e-5;
  for (int trial = 0; trial < 5; ++trial) {
    const WaveField f = testing::random_smooth(g, rng);
    const WaveField d = testing::random_smooth(g, rng, 1.0);
    WaveField fp = f;
    fp.axpy(h, d);
    WaveField fm = f;
    fm.axpy(-h, d);
    const double fd = energy_difference(fm, fp, p) / (2.0 * h);
    const double an = 2.0 * inner_product(d, euler_lagrange_apply(f, p)).real();
    CHECK(std::abs(fd - an) < 1e-6 * std::abs(an));
  }
}

TEST_CASE("energy difference agrees with the plain difference") {
  const Grid g = make_grid(64, 8.0);
  std::mt19937_64 rng(4);
  const WaveField f = testing::random_smooth(g, rng);
  const WaveField h = testing::random_smooth(g, rng);
  PhysicsParams p;
  CHECK(energy_difference(f, h, p) == doctest::Approx(energy(h, p) - energy(f, p)).epsilon(1e-12));
}

TEST_CASE("gauge invariance") {
  const Grid g = make_grid(64, 8.0);
  std::mt19937_64 rng(8);
  const WaveField f = testing::random_smooth(g, rng);
  const WaveField r = std::polar(1.0, 0.77) * f;
  PhysicsParams p;
  CHECK(std::abs(energy(r, p) - energy(f, p)) < 1e-12 * std::abs(energy(f, p)));
  CHECK(std::abs(mass(r) - mass(f)) < 1e-12 * mass(f));
  CHECK(std::abs(angular_momentum(r) - angular_momentum(f)) < 1e-12 * mass(f));
}

TEST_CASE("reflection keeps mass and energy and flips L") {
  const Grid g = make_grid(64, 8.0);
  std::mt19937_64 rng(13);
  WaveField f = testing::random_smooth(g, rng);
  f.axpy(0.7, vortex(g, 2));
  const WaveField t = reflect_x1(f);
  PhysicsParams p;
  CHECK(std::abs(mass(t) - mass(f)) < 1e-13 * mass(f));
  CHECK(std::abs(energy(t, p) - energy(f, p)) < 1e-13 * std::abs(energy(f, p)));
  CHECK(std::abs(angular_momentum(t) + angular_momentum(f)) < 1e-12 * mass(f));
  CHECK(std::abs(angular_momentum(f)) > 1e-2);
  const WaveField back = reflect_x1(t);
  bool same = true;
  for (std::size_t i = 0; i < f.size(); ++i) same = same && back[i] == f[i];
  CHECK(same);
}

TEST_CASE("multipliers of a radial field are degenerate") {
  const Grid g = make_grid(128, 8.0);
  const WaveField f = gaussian(g);
  PhysicsParams p;
  const Multipliers mu = multipliers_estimate(f, p);
  CHECK(mu.degenerate);
  CHECK(std::abs(mu.Omega) < 1e-12);
  const double expected = inner_product(f, euler_lagrange_apply(f, p)).real() / mass(f);
  CHECK(mu.omega == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("multipliers of a single vortex fix omega + n Omega") {
  const Grid g = make_grid(128, 8.0);
  const WaveField f = vortex(g, 2);
  PhysicsParams p;
  const Multipliers mu = multipliers_estimate(f, p);
  CHECK(mu.degenerate);
  const double combo = inner_product(f, euler_lagrange_apply(f, p)).real() / mass(f);
  CHECK(mu.omega + 2.0 * mu.Omega == doctest::Approx(combo).epsilon(1e-8));
  // Minimal norm: (omega, Omega) is parallel to (1, 2).
  CHECK(std::abs(2.0 * mu.omega - mu.Omega) < 1e-8 * std::abs(combo));
}

TEST_CASE("stationary residual is the least-squares optimum") {
  const Grid g = make_grid(64, 8.0);
  std::mt19937_64 rng(17);
  WaveField f = testing::random_smooth(g, rng);
  PhysicsParams p;
  const Multipliers mu = multipliers_estimate(f, p);
  const double best = stationary_residual(f, p, mu);
  for (double dw : {-1e-3, 1e-3}) {
    for (double dW : {-1e-3, 0.0, 1e-3}) {
      const Multipliers other{mu.omega + dw, mu.Omega + dW, false};
      CHECK(stationary_residual(f, p, other) >= best);
    }
  }
}

TEST_CASE("random fields are far from stationary") {
  const Grid g = make_grid(64, 8.0);
  std::mt19937_64 rng(19);
  WaveField f = testing::random_smooth(g, rng);
  f *= 1.0 / l2_norm(f);
  PhysicsParams p;
  const Multipliers mu = multipliers_estimate(f, p);
  CHECK(stationary_residual(f, p, mu) > 1e-1);
}

TEST_CASE("identity holds for any field with its own least-squares multipliers") {
  // The residual is orthogonal to f and L_z f, so the identity alone cannot detect
  // non-stationary fields; it does detect multipliers that belong to another field.
  const Grid g = make_grid(64, 8.0);
  std::mt19937_64 rng(19);
  WaveField f = testing::random_smooth(g, rng);
  f *= 1.0 / l2_norm(f);
  WaveField h = testing::random_smooth(g, rng);
  h *= 1.0 / l2_norm(h);
  PhysicsParams p;
  const Constraints c{mass(f), angular_momentum(f)};
  CHECK(identity_check(f, p, c, multipliers_estimate(f, p)) < 1e-12);
  CHECK(identity_check(f, p, c, multipliers_estimate(h, p)) > 1e-2);
}

TEST_CASE("identity collapses to E = omega m without interaction") {
  // With lambda = 0, E(f) = <f, H f> and the radial omega is <f, H f> / m.
  const Grid g = make_grid(128, 8.0);
  const PhysicsParams p = linear_quartic();
  const WaveField f = gaussian(g, 0.8);
  const Multipliers mu = multipliers_estimate(f, p);
  CHECK(std::abs(energy(f, p) - mu.omega * mass(f)) < 1e-12);
  CHECK(identity_check(f, p, Constraints{mass(f), 0.0}, mu) < 1e-12);
}

TEST_CASE("physics validation") {
  PhysicsParams p;
  CHECK_NOTHROW(validate(p));
  p.k = 2.0;
  CHECK_THROWS_AS(validate(p), ValidationError);
  p.k = 4.0;
  p.lambda = -1.0;
  p.sigma = 0.5;
  CHECK_NOTHROW(validate(p));
  p.sigma = 1.5;
  CHECK_THROWS_AS(validate(p), ValidationError);
}
