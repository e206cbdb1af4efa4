#include "rotbound/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "rotbound/fft.hpp"
#include "rotbound/spectral.hpp"

namespace rotbound {

namespace {

// std::polar is off unit modulus by an ulp or so; in a stationary state the same
// factors repeat every step, so the bias would accumulate linearly in the mass.
cplx unit_phase(double angle) {
  const cplx z = std::polar(1.0, angle);
  return z * (1.5 - 0.5 * std::norm(z));
}

}  // namespace

StrangStepper::StrangStepper(const Grid& grid, double dt, const PhysicsParams& p)
    : grid_(grid), dt_(dt), p_(p), potential_(potential_table(grid, p)) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const auto k = wavenumbers(grid, false);
  const long double scale = 1.0L / (static_cast<long double>(grid.n) * grid.n);
  kinetic_.resize(grid.size());
  work_.resize(grid.size());
  for (int a = 0; a < grid.n; ++a) {
    for (int b = 0; b < grid.n; ++b) {
      const long double angle = -0.5L * dt * (static_cast<long double>(k[a]) * k[a] + static_cast<long double>(k[b]) * k[b]);
      kinetic_[grid.index(a, b)] = std::polar(scale, angle);
    }
  }
}

void StrangStepper::kick(WaveField& f, double tau) const {
  auto v = f.values();
  const auto& pot = *potential_;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double w = pot[i];
    if (p_.lambda != 0.0) {
      const double a = std::norm(v[i]);
      w += p_.lambda * (p_.sigma == 1.0 ? a : std::pow(a, p_.sigma));
    }
    v[i] *= unit_phase(-tau * w);
  }
}

void StrangStepper::step(WaveField& f) const {
  if (!(f.grid() == grid_)) throw GridMismatch();
  kick(f, 0.5 * dt_);
  auto v = f.values();
  const Fft2dExtended& fft = Fft2dExtended::for_size(grid_.n);
  for (std::size_t i = 0; i < v.size(); ++i) work_[i] = v[i];
  fft.forward(work_);
  for (std::size_t i = 0; i < v.size(); ++i) work_[i] *= kinetic_[i];
  fft.backward(work_);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = cplx(static_cast<double>(work_[i].real()), static_cast<double>(work_[i].imag()));
  }
  kick(f, 0.5 * dt_);
}

WaveField step_strang(const WaveField& f, double dt, const PhysicsParams& p) {
  WaveField out = f;
  StrangStepper(f.grid(), dt, p).step(out);
  return out;
}

WaveField apply_h1_operator(const WaveField& f, const PhysicsParams& p) {
  WaveField out = laplacian(f);
  out *= -1.0;
  const auto table = potential_table(f.grid(), p);
  auto ov = out.values();
  const auto fv = f.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] += (1.0 + (*table)[i]) * fv[i];
  return out;
}

double h1_norm(const WaveField& f, const PhysicsParams& p) {
  return std::sqrt(std::max(0.0, inner_product(f, apply_h1_operator(f, p)).real()));
}

OrbitMetric::OrbitMetric(const WaveField& phi, const PhysicsParams& p, int max_krylov)
    : p_(p), krylov_(phi, max_krylov) {
  krylov_.extend_to(max_krylov);
  theta_ = krylov_.ritz_values();
  const auto& basis = krylov_.basis();
  const std::size_t k = basis.size();
  std::vector<WaveField> images;
  images.reserve(k);
  for (const auto& v : basis) images.push_back(apply_h1_operator(v, p));
  gram_.assign(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      const cplx g = inner_product(basis[i], images[j]);
      gram_[i * k + j] = g;
      gram_[j * k + i] = std::conj(g);
    }
  }
}

std::vector<cplx> OrbitMetric::coords(double alpha, int order) const {
  std::vector<cplx> factors(theta_.size());
  for (std::size_t j = 0; j < theta_.size(); ++j) {
    factors[j] = std::polar(1.0, alpha * theta_[j]) * std::pow(cplx(0.0, theta_[j]), order);
  }
  return krylov_.coordinates(factors);
}

namespace {

// Exact R_{j pi/2}: the cell-centred grid maps onto itself under quarter turns, and the
// permutation commutes with L_z, the spectral Laplacian and the radial potential.
WaveField quarter_turns(const WaveField& f, int j) {
  j = ((j % 4) + 4) % 4;
  if (j == 0) return f;
  const int n = f.grid().n;
  WaveField out = f;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      switch (j) {
        case 1: out.at(a, b) = f.at(n - 1 - b, a); break;
        case 2: out.at(a, b) = f.at(n - 1 - a, n - 1 - b); break;
        default: out.at(a, b) = f.at(b, n - 1 - a); break;
      }
    }
  }
  return out;
}

}  // namespace

WaveField OrbitMetric::rotated(double alpha) const {
  const double quarter = 0.5 * std::numbers::pi;
  const double j = std::round(alpha / quarter);
  return quarter_turns(krylov_.synthesize(coords(alpha - j * quarter, 0)), static_cast<int>(j));
}

OrbitMetric::Match OrbitMetric::match(const WaveField& u) const {
  const auto& basis = krylov_.basis();
  require_same_grid(u, basis.front());
  const std::size_t k = basis.size();
  const WaveField au = apply_h1_operator(u, p_);
  // The Krylov exponential is only accurate for small angles, so alpha = j pi/2 + beta
  // with |beta| <= pi/4 and the quarter turn moved onto u.
  std::array<std::vector<cplx>, 4> b;
  for (int j = 0; j < 4; ++j) {
    const WaveField turned = quarter_turns(au, -j);
    b[j].resize(k);
    for (std::size_t i = 0; i < k; ++i) b[j][i] = inner_product(turned, basis[i]);
  }

  auto dot = [&](int j, const std::vector<cplx>& y) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += b[j][i] * y[i];
    return acc;
  };
  auto quad = [&](const std::vector<cplx>& x, const std::vector<cplx>& y) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) acc += std::conj(x[i]) * gram_[i * k + j] * y[j];
    }
    return acc.real();
  };
  // F(beta) = |R_beta phi|^2 - 2 |<u, Q^j R_beta phi>|: the squared distance up to |u|^2.
  auto objective = [&](int j, double beta) {
    const auto y = coords(beta, 0);
    return quad(y, y) - 2.0 * std::abs(dot(j, y));
  };
  auto slope = [&](int j, double beta) {
    const auto y = coords(beta, 0);
    const auto y1 = coords(beta, 1);
    const cplx c = dot(j, y);
    const cplx c1 = dot(j, y1);
    const double ac = std::max(std::abs(c), 1e-300);
    return 2.0 * quad(y, y1) - 2.0 * (std::conj(c) * c1).real() / ac;
  };

  constexpr int kScan = 16;  // per quarter turn
  const double two_pi = 2.0 * std::numbers::pi;
  const double quarter = 0.5 * std::numbers::pi;
  const double cell = quarter / kScan;
  int turn = 0;
  int best = 0;
  double best_val = objective(0, 0.0);
  for (int j = 0; j < 4; ++j) {
    for (int s = -kScan / 2; s < kScan / 2; ++s) {
      const double v = objective(j, s * cell);
      if (v < best_val) {
        best_val = v;
        turn = j;
        best = s;
      }
    }
  }
  auto f = [&](double beta) { return objective(turn, beta); };
  // Golden section on the bracket around the coarse minimum.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = (best - 1) * cell;
  double hi = (best + 1) * cell;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > 1e-7) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  double beta = 0.5 * (lo + hi);
  // Secant refinement on the slope, which keeps full relative accuracy near the minimum.
  {
    double a0 = beta - 1e-6;
    double a1 = beta;
    double s0 = slope(turn, a0);
    double s1 = slope(turn, a1);
    for (int it = 0; it < 8 && s1 != s0; ++it) {
      const double a2 = a1 - s1 * (a1 - a0) / (s1 - s0);
      if (!std::isfinite(a2) || std::abs(a2 - beta) > cell) break;
      a0 = a1;
      s0 = s1;
      a1 = a2;
      s1 = slope(turn, a1);
      if (std::abs(a1 - a0) < 1e-15) break;
    }
    if (f(a1) <= f(beta)) beta = a1;
  }

  const cplx c = dot(turn, coords(beta, 0));
  Match m;
  const double alpha = turn * quarter + beta;
  m.alpha = std::fmod(std::fmod(alpha, two_pi) + two_pi, two_pi);
  m.theta = -std::arg(c);
  WaveField diff = u;
  diff.axpy(-std::polar(1.0, m.theta), quarter_turns(krylov_.synthesize(coords(beta, 0)), turn));
  m.distance = h1_norm(diff, p_);
  return m;
}

double orbit_distance(const WaveField& u, const OrbitReference& ref, const PhysicsParams& p) {
  return OrbitMetric(ref.phi, p).distance(u);
}

EvolveTrace evolve(const WaveField& f0, const PhysicsParams& p, const EvolveOptions& opts,
                   const OrbitReference* ref) {
  if (!(opts.T > 0.0)) throw InvalidArgument("evolution time must be positive");
  if (!(opts.dt > 0.0) || opts.dt > 1e-2) throw InvalidArgument("dt must lie in (0, 1e-2]");
  if (opts.record_stride < 1) throw InvalidArgument("record stride must be at least 1");
  if (!f0.all_finite()) throw InvalidArgument("initial field is not finite");

  const long steps = std::max(1L, std::lround(std::ceil(opts.T / opts.dt - 1e-9)));
  const double dt = opts.T / static_cast<double>(steps);
  const StrangStepper stepper(f0.grid(), dt, p);
  std::optional<OrbitMetric> metric;
  if (ref != nullptr) metric.emplace(ref->phi, p);

  const double m0 = mass(f0);
  const double e0 = energy(f0, p);
  const double l0 = angular_momentum(f0);
  EvolveTrace trace;
  WaveField f = f0;
  auto record = [&](double t) {
    if (!f.all_finite()) throw BlowUp(t);
    trace.times.push_back(t);
    trace.mass_drift.push_back(std::abs(mass(f) - m0) / m0);
    trace.energy_drift.push_back(std::abs(energy(f, p) - e0) / std::max(1.0, std::abs(e0)));
    trace.angmom_drift.push_back(std::abs(angular_momentum(f) - l0) / std::max(std::abs(l0), m0));
    if (metric) trace.orbit_distance.push_back(metric->distance(f));
  };
  record(0.0);
  for (long s = 1; s <= steps; ++s) {
    stepper.step(f);
    if (s % opts.record_stride == 0 || s == steps) record(static_cast<double>(s) * dt);
  }
  trace.final_field = std::move(f);
  return trace;
}

WaveField random_perturbation(const Grid& grid, const PhysicsParams& p, double epsilon, std::uint64_t seed,
                              double k_cut, double width) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("perturbation size must be non-negative");
  WaveField f(grid);
  if (epsilon == 0.0) return f;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto k = wavenumbers(grid, true);
  auto v = f.values();
  for (int a = 0; a < grid.n; ++a) {
    for (int b = 0; b < grid.n; ++b) {
      if (k[a] * k[a] + k[b] * k[b] <= k_cut * k_cut) {
        const double re = normal(rng);
        const double im = normal(rng);
        v[grid.index(a, b)] = cplx(re, im);
      }
    }
  }
  Fft2d::for_size(grid.n).backward(v);
  const double inv_w2 = 1.0 / (width * width);
  for (int a = 0; a < grid.n; ++a) {
    for (int b = 0; b < grid.n; ++b) {
      const double x1 = grid.coord(a);
      const double x2 = grid.coord(b);
      v[grid.index(a, b)] *= std::exp(-0.5 * (x1 * x1 + x2 * x2) * inv_w2);
    }
  }
  f *= epsilon / h1_norm(f, p);
  return f;
}

StabilityReport stability_experiment(const OrbitReference& ref, double epsilon, const PhysicsParams& p,
                                     const EvolveOptions& opts, std::uint64_t seed) {
  WaveField u0 = ref.phi;
  u0 += random_perturbation(ref.phi.grid(), p, epsilon, seed);
  StabilityReport rep;
  rep.trace = evolve(u0, p, opts, &ref);
  rep.initial_distance = rep.trace.orbit_distance.front();
  rep.sup_distance = *std::max_element(rep.trace.orbit_distance.begin(), rep.trace.orbit_distance.end());
  return rep;
}

}  // namespace rotbound
