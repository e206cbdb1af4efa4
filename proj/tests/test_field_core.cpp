#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "rotbound/checkpoint.hpp"
#include "rotbound/fft.hpp"
#include "rotbound/functionals.hpp"
#include "rotbound/krylov.hpp"
#include "rotbound/modes.hpp"
#include "rotbound/spectral.hpp"
#include "support.hpp"

using namespace rotbound;
using testing::gaussian;
using testing::vortex;

TEST_CASE("grid is cell centred and validated") {
  const Grid g = make_grid(64, 8.0);
  CHECK(g.spacing() == doctest::Approx(0.25));
  CHECK(g.coord(0) == doctest::Approx(-7.875));
  CHECK(g.coord(31) + g.coord(32) == doctest::Approx(0.0));
  CHECK(g.index(1, 0) == 64);
  CHECK_THROWS_AS(make_grid(63, 8.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(8, 8.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(64, 0.0), InvalidArgument);
}

TEST_CASE("inner product is conjugate linear in the first slot") {
  const Grid g = make_grid(32, 6.0);
  std::mt19937_64 rng(3);
  const WaveField f = testing::random_smooth(g, rng);
  const WaveField h = testing::random_smooth(g, rng);
  const cplx s(0.3, -1.7);
  const cplx a = inner_product(s * f, h);
  const cplx b = std::conj(s) * inner_product(f, h);
  CHECK(std::abs(a - b) < 1e-12 * std::abs(b));
  CHECK(std::abs(inner_product(f, h) - std::conj(inner_product(h, f))) < 1e-13);
  CHECK(l2_norm(f) * l2_norm(f) == doctest::Approx(mass(f)).epsilon(1e-14));
}

TEST_CASE("mixing grids is rejected") {
  const WaveField a(make_grid(32, 6.0));
  const WaveField b(make_grid(32, 7.0));
  CHECK_THROWS_AS(inner_product(a, b), GridMismatch);
}

TEST_CASE("FFT round trip is the identity") {
  const Grid g = make_grid(32, 6.0);
  std::mt19937_64 rng(5);
  WaveField f = testing::random_smooth(g, rng);
  const WaveField orig = f;
  const Fft2d& fft = Fft2d::for_size(32);
  fft.forward(f.values());
  fft.backward(f.values());
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(f[i] - orig[i]));
  CHECK(err < 1e-14);
}

TEST_CASE("spectral derivatives of a Gaussian") {
  const Grid g = make_grid(128, 8.0);
  const WaveField f = gaussian(g);
  const auto [d1, d2] = gradient_spectral(f);
  const WaveField lap = laplacian(f);
  double e1 = 0.0;
  double el = 0.0;
  for (int a = 0; a < g.n; ++a) {
    for (int b = 0; b < g.n; ++b) {
      const double x = g.coord(a);
      const double y = g.coord(b);
      const double u = std::exp(-0.5 * (x * x + y * y));
      e1 = std::max(e1, std::abs(d1.at(a, b) - cplx(-x * u, 0.0)));
      el = std::max(el, std::abs(lap.at(a, b) - cplx((x * x + y * y - 2.0) * u, 0.0)));
    }
  }
  CHECK(e1 < 1e-10);
  CHECK(el < 1e-10);
  CHECK(gradient_norm_sq(f) == doctest::Approx(std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("L_z acts as n on a vortex") {
  const Grid g = make_grid(128, 8.0);
  for (int n : {-2, 1, 3}) {
    const WaveField f = vortex(g, n);
    WaveField r = apply_Lz(f);
    r.axpy(-static_cast<double>(n), f);
    CHECK(l2_norm(r) < 1e-9 * l2_norm(f));
    CHECK(angular_momentum(f) == doctest::Approx(n * mass(f)).epsilon(1e-10));
  }
}

TEST_CASE("angular modes of a two-mode field") {
  const Grid g = make_grid(128, 8.0);
  WaveField f = vortex(g, 0);
  f.axpy(0.5, vortex(g, 2));
  const AngularModes m = to_modes(f, 8);
  const double m0 = m.mode_mass(0);
  const double m2 = m.mode_mass(2);
  CHECK(m0 == doctest::Approx(mass(vortex(g, 0))).epsilon(1e-8));
  CHECK(m2 == doctest::Approx(0.25 * mass(vortex(g, 2))).epsilon(1e-8));
  CHECK(m.mode_mass(1) < 1e-12 * m0);
  CHECK(m.mode_mass(-2) < 1e-12 * m0);
  CHECK(m.total_mass() == doctest::Approx(mass(f)).epsilon(1e-8));
  CHECK_THROWS_AS(to_modes(f, 40), InvalidArgument);

  const WaveField back = from_modes(m, g);
  WaveField d = back;
  d -= f;
  CHECK(l2_norm(d) < 1e-6 * l2_norm(f));
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(8, x, w);
  double s0 = 0.0;
  double s14 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s14 += w[i] * std::pow(x[i], 14);
  }
  CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("checkpoint round trip is bit exact") {
  const Grid g = make_grid(32, 5.5);
  std::mt19937_64 rng(9);
  const WaveField f = testing::random_smooth(g, rng);
  std::stringstream buf;
  write_checkpoint(buf, f);
  const WaveField r = read_checkpoint(buf);
  REQUIRE(r.grid() == g);
  bool same = true;
  for (std::size_t i = 0; i < f.size(); ++i) same = same && f[i] == r[i];
  CHECK(same);
}

TEST_CASE("malformed checkpoints are rejected") {
  const Grid g = make_grid(16, 4.0);
  std::stringstream good;
  write_checkpoint(good, WaveField(g));
  const std::string bytes = good.str();

  std::stringstream bad_magic(std::string("NLSX") + bytes.substr(4));
  CHECK_THROWS_AS(read_checkpoint(bad_magic), FormatError);
  std::stringstream truncated(bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS_AS(read_checkpoint(truncated), FormatError);
  std::string wrong_version = bytes;
  wrong_version[4] = 7;
  std::stringstream versioned(wrong_version);
  CHECK_THROWS_AS(read_checkpoint(versioned), FormatError);
}

TEST_CASE("Krylov space reproduces mass and angular momentum") {
  const Grid g = make_grid(64, 8.0);
  std::mt19937_64 rng(11);
  const WaveField f = testing::random_smooth(g, rng);
  LzKrylov k(f, 24);
  k.extend_to(24);
  double total = 0.0;
  double first = 0.0;
  const auto& th = k.ritz_values();
  const auto& w = k.ritz_weights();
  for (std::size_t j = 0; j < th.size(); ++j) {
    total += w[j];
    first += th[j] * w[j];
  }
  CHECK(total == doctest::Approx(mass(f)).epsilon(1e-12));
  CHECK(first == doctest::Approx(angular_momentum(f)).epsilon(1e-9));
  const WaveField same = k.synthesize(k.coordinates(std::vector<cplx>(th.size(), 1.0)));
  WaveField d = same;
  d -= f;
  CHECK(l2_norm(d) < 1e-12 * l2_norm(f));
}

TEST_CASE("mass outside a radius") {
  const Grid g = make_grid(128, 8.0);
  const WaveField f = gaussian(g);
  CHECK(mass_outside_radius(f, 2.0) == doctest::Approx(std::numbers::pi * std::exp(-4.0)).epsilon(2e-2));
  CHECK(mass_outside_radius(f, 7.2) < 1e-20);
}
