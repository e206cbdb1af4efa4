#include "rotbound/constraint_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "rotbound/krylov.hpp"
#include "rotbound/spectral.hpp"

namespace rotbound {

double ModeMassProfile::total() const {
  double acc = 0.0;
  for (const auto& [n, m] : mu) acc += m;
  return acc;
}

double ModeMassProfile::first_moment() const {
  double acc = 0.0;
  for (const auto& [n, m] : mu) acc += n * m;
  return acc;
}

ModeMassProfile mode_mass_profile(const AngularModes& modes) {
  ModeMassProfile profile;
  for (int n = -modes.n_max; n <= modes.n_max; ++n) profile.mu[n] = modes.mode_mass(n);
  return profile;
}

Feasibility feasibility(std::span<const double> labels, std::span<const double> weights,
                        const Constraints& c, double occupancy) {
  double total = 0.0;
  for (double w : weights) total += std::max(w, 0.0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (weights[j] > occupancy * total && weights[j] > 0.0) {
      lo = std::min(lo, labels[j]);
      hi = std::max(hi, labels[j]);
    }
  }
  if (!(total > 0.0) || lo > hi) return {FeasibilityStatus::kEmpty, "no occupied angular modes"};
  if (!(c.m > 0.0)) return {FeasibilityStatus::kEmpty, "target mass must be positive"};

  const double ratio = c.l / c.m;
  const double slack = 1e-9 * std::max(1.0, std::abs(ratio));
  std::ostringstream msg;
  if (ratio < lo - slack) {
    msg << "l/m = " << ratio << " lies below the smallest occupied mode " << lo;
    return {FeasibilityStatus::kBelowSupport, msg.str()};
  }
  if (ratio > hi + slack) {
    msg << "l/m = " << ratio << " lies above the largest occupied mode " << hi;
    return {FeasibilityStatus::kAboveSupport, msg.str()};
  }
  return {};
}

Feasibility feasibility(const ModeMassProfile& profile, const Constraints& c, double occupancy) {
  std::vector<double> labels;
  std::vector<double> weights;
  for (const auto& [n, m] : profile.mu) {
    labels.push_back(n);
    weights.push_back(m);
  }
  return feasibility(labels, weights, c, occupancy);
}

MassSplit mass_split(const Constraints& c, int n1, int n2) {
  if (n1 == n2) throw InvalidArgument("two-mode seed needs distinct modes");
  const double dn = static_cast<double>(n2) - n1;
  const MassSplit s{(c.m * n2 - c.l) / dn, (c.l - c.m * n1) / dn};
  if (!(s.m1 > 0.0) || !(s.m2 > 0.0)) {
    std::ostringstream msg;
    msg << "modes (" << n1 << ", " << n2 << ") cannot carry (m, l) = (" << c.m << ", " << c.l
        << "): mass split " << s.m1 << " / " << s.m2;
    throw MassSplitNegative(msg.str());
  }
  return s;
}

WaveField mode_component(const Grid& grid, int n, double mode_mass, const RadialProfile& profile) {
  const double inv_w2 = 1.0 / (profile.width * profile.width);
  const int power = std::abs(n);
  WaveField f = WaveField::from_function(grid, [&](double x1, double x2) {
    const double r2 = x1 * x1 + x2 * x2;
    // r^{|n|} e^{i n phi} = (x1 + i sign(n) x2)^{|n|}
    const cplx z(x1, n >= 0 ? x2 : -x2);
    cplx zp = 1.0;
    for (int k = 0; k < power; ++k) zp *= z;
    return zp * std::exp(-0.5 * r2 * inv_w2);
  });
  f *= std::sqrt(mode_mass / mass(f));
  return f;
}

WaveField two_mode_seed(const Grid& grid, const Constraints& c, int n1, int n2,
                        const RadialProfile& profile) {
  const MassSplit s = mass_split(c, n1, n2);
  WaveField f = mode_component(grid, n1, s.m1, profile);
  f += mode_component(grid, n2, s.m2, profile);
  return f;
}

Tilt solve_tilt(std::span<const double> labels, std::span<const double> weights, const Constraints& c,
                double occupancy, double tol, int max_iterations) {
  const Feasibility feas = feasibility(labels, weights, c, occupancy);
  if (!feas.ok()) throw ConstraintInfeasible(feas.reason);

  const std::size_t k = labels.size();
  double total = 0.0;
  for (double w : weights) total += std::max(w, 0.0);
  std::vector<char> occupied(k);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    occupied[j] = weights[j] > occupancy * total && weights[j] > 0.0;
    if (occupied[j]) {
      lo = std::min(lo, labels[j]);
      hi = std::max(hi, labels[j]);
    }
  }
  const double ratio = c.l / c.m;
  const double scale = std::max(1.0, std::abs(ratio));

  struct Moments {
    double log_s0;  // log of sum w e^{b n} (tilted modes) + sum w (untilted)
    double mean;
    double var;
  };
  auto moments = [&](double b) {
    double shift = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (occupied[j]) shift = std::max(shift, b * labels[j]);
    }
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (!(weights[j] > 0.0)) continue;
      const double z = occupied[j] ? b * labels[j] : 0.0;
      const double e = weights[j] * std::exp(z - shift);
      s0 += e;
      s1 += e * labels[j];
      s2 += e * labels[j] * labels[j];
    }
    const double mean = s1 / s0;
    return Moments{std::log(s0) + shift, mean, std::max(s2 / s0 - mean * mean, 0.0)};
  };

  Tilt t;
  Moments mo = moments(0.0);
  if (hi - lo <= 1e-9 * std::max(1.0, std::max(std::abs(lo), std::abs(hi))) ||
      std::abs(mo.mean - ratio) <= tol * scale) {
    // Single occupied mode (tilt direction unidentifiable) or already on target.
    t.a = std::log(c.m) - mo.log_s0;
    return t;
  }

  double b_lo = -1.0;
  double b_hi = 1.0;
  for (int it = 0; it < 200 && moments(b_lo).mean > ratio; ++it) b_lo *= 2.0;
  for (int it = 0; it < 200 && moments(b_hi).mean < ratio; ++it) b_hi *= 2.0;
  if (moments(b_lo).mean > ratio || moments(b_hi).mean < ratio) {
    throw NewtonDiverged("tilt parameter could not be bracketed", 0.0, 0.0, 0.0, mo.mean * c.m - c.l);
  }

  double b = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    mo = moments(b);
    t.iterations = it;
    const double err = mo.mean - ratio;
    if (std::abs(err) <= tol * scale) {
      t.b = b;
      t.a = std::log(c.m) - mo.log_s0;
      return t;
    }
    if (err < 0.0) {
      b_lo = std::max(b_lo, b);
    } else {
      b_hi = std::min(b_hi, b);
    }
    double next = mo.var > 0.0 ? b - err / mo.var : 0.5 * (b_lo + b_hi);
    if (!(next > b_lo && next < b_hi)) next = 0.5 * (b_lo + b_hi);
    if (next == b) break;
    b = next;
  }
  mo = moments(b);
  throw NewtonDiverged("tilt iteration did not converge", std::log(c.m) - mo.log_s0, b, 0.0,
                       (mo.mean - ratio) * c.m);
}

WaveField retract(const WaveField& f, const Constraints& c, const RetractOptions& opts, RetractInfo* info) {
  if (!(c.m > 0.0)) throw InvalidArgument("target mass must be positive");
  LzKrylov krylov(f, opts.max_krylov);
  krylov.extend_to(4);
  for (;;) {
    const auto& labels = krylov.ritz_values();
    const auto& weights = krylov.ritz_weights();
    const Feasibility feas = feasibility(labels, weights, c);
    if (!feas.ok()) {
      // Small Krylov spaces underestimate the mode support; grow before giving up.
      if (krylov.extend()) continue;
      throw ConstraintInfeasible(feas.reason);
    }
    const Tilt tilt = solve_tilt(labels, weights, c, kDefaultOccupancy, opts.newton_tol, opts.max_newton);
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<cplx> factors(labels.size());
    for (std::size_t j = 0; j < labels.size(); ++j) {
      const bool occupied = weights[j] > kDefaultOccupancy * total;
      factors[j] = std::exp(0.5 * (tilt.a + (occupied ? tilt.b * labels[j] : 0.0)));
    }
    const auto y = krylov.coordinates(factors);
    double ynorm = 0.0;
    for (const auto& v : y) ynorm += std::norm(v);
    ynorm = std::sqrt(ynorm);
    const bool resolved = std::abs(y.back()) <= opts.tail_tol * ynorm;
    if (resolved || krylov.exhausted() || !krylov.extend()) {
      if (info != nullptr) *info = RetractInfo{tilt, krylov.dim()};
      return krylov.synthesize(y);
    }
    krylov.extend_to(krylov.dim() + 3);
  }
}

WaveField tangent_project(const WaveField& g, const WaveField& f, const WaveField& lz_f) {
  const SpanFit fit = fit_constraint_span(g, f, lz_f);
  WaveField out = g;
  out.axpy(-fit.c_f, f);
  out.axpy(-fit.c_lz, lz_f);
  return out;
}

WaveField tangent_project(const WaveField& g, const WaveField& f) {
  if (!(mass(f) > 0.0)) throw InvalidArgument("tangent projection at a zero field");
  return tangent_project(g, f, apply_Lz(f));
}

}  // namespace rotbound
