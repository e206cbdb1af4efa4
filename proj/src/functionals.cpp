#include "rotbound/functionals.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "rotbound/spectral.hpp"

namespace rotbound {

void validate(const PhysicsParams& p) {
  if (!std::isfinite(p.k) || !(p.k > 2.0)) {
    throw ValidationError("k must exceed 2 (the trap must be super-quadratic)");
  }
  if (!std::isfinite(p.sigma) || !(p.sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (!std::isfinite(p.lambda)) throw ValidationError("lambda must be finite");
  if (p.lambda < 0.0 && !(p.sigma < 1.0)) {
    throw ValidationError("lambda<=0 requires sigma<1 in d=2 (focusing nonlinearity must be mass-subcritical)");
  }
  if (p.lambda > 0.0 && p.sigma > 4.0) {
    throw ValidationError("sigma must not exceed 4 for lambda>0 (numerical cap)");
  }
}

std::shared_ptr<const std::vector<double>> potential_table(const Grid& grid, const PhysicsParams& p) {
  using Key = std::tuple<int, double, double, double>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const std::vector<double>>> cache;
  const Key key{grid.n, grid.extent, p.k, p.trap};
  std::lock_guard lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto table = std::make_shared<std::vector<double>>(grid.size());
  for (int a = 0; a < grid.n; ++a) {
    const double x1 = grid.coord(a);
    for (int b = 0; b < grid.n; ++b) {
      const double x2 = grid.coord(b);
      (*table)[grid.index(a, b)] = p.trap == 0.0 ? 0.0 : p.trap * std::pow(x1 * x1 + x2 * x2, 0.5 * p.k);
    }
  }
  if (cache.size() > 16) cache.clear();
  cache.emplace(key, table);
  return table;
}

double mass(const WaveField& f) { return inner_product(f, f).real(); }

double nonlinear_moment(const WaveField& f, double sigma) {
  double acc = 0.0;
  if (sigma == 1.0) {
    for (const auto& v : f.values()) {
      const double a = std::norm(v);
      acc += a * a;
    }
  } else {
    for (const auto& v : f.values()) acc += std::pow(std::norm(v), sigma + 1.0);
  }
  return f.grid().cell_area() * acc;
}

double potential_energy(const WaveField& f, const PhysicsParams& p) {
  const auto table = potential_table(f.grid(), p);
  const auto v = f.values();
  double acc = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) acc += (*table)[k] * std::norm(v[k]);
  return f.grid().cell_area() * acc;
}

double energy(const WaveField& f, const PhysicsParams& p) {
  double e = 0.5 * gradient_norm_sq(f) + potential_energy(f, p);
  if (p.lambda != 0.0) e += p.lambda / (p.sigma + 1.0) * nonlinear_moment(f, p.sigma);
  return e;
}

double energy_difference(const WaveField& f, const WaveField& g, const PhysicsParams& p) {
  require_same_grid(f, g);
  const WaveField d = g - f;
  const WaveField hf = apply_hamiltonian(f, p);
  double diff = 2.0 * inner_product(d, hf).real() + 0.5 * gradient_norm_sq(d) + potential_energy(d, p);
  if (p.lambda != 0.0) {
    const auto fv = f.values();
    const auto dv = d.values();
    const double s1 = p.sigma + 1.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < fv.size(); ++k) {
      const double a = std::norm(fv[k]);
      // |g|^2 - |f|^2 without cancellation.
      const double q = 2.0 * (std::conj(fv[k]) * dv[k]).real() + std::norm(dv[k]);
      if (p.sigma == 1.0) {
        acc += q * (2.0 * a + q);
      } else if (a > 0.0) {
        acc += std::pow(a, s1) * std::expm1(s1 * std::log1p(q / a));
      } else {
        acc += std::pow(std::max(q, 0.0), s1);
      }
    }
    diff += p.lambda / s1 * f.grid().cell_area() * acc;
  }
  return diff;
}

double angular_momentum(const WaveField& f) {
  const cplx v = inner_product(f, apply_Lz(f));
  const double m = mass(f);
  if (!std::isfinite(v.real()) || std::abs(v.imag()) > 1e-10 * std::max(m, 1e-300)) {
    throw NumericalError("<f, L_z f> is not real; the field is broken or not confined");
  }
  return v.real();
}

double rotating_energy(const WaveField& f, const PhysicsParams& p, double Omega) {
  if (Omega == 0.0) return energy(f, p);
  return energy(f, p) - Omega * angular_momentum(f);
}

WaveField apply_hamiltonian(const WaveField& f, const PhysicsParams& p) {
  WaveField out = laplacian(f);
  out *= -0.5;
  const auto table = potential_table(f.grid(), p);
  auto ov = out.values();
  const auto fv = f.values();
  for (std::size_t k = 0; k < ov.size(); ++k) ov[k] += (*table)[k] * fv[k];
  return out;
}

WaveField euler_lagrange_apply(const WaveField& f, const PhysicsParams& p) {
  WaveField out = apply_hamiltonian(f, p);
  if (p.lambda != 0.0) {
    auto ov = out.values();
    const auto fv = f.values();
    for (std::size_t k = 0; k < ov.size(); ++k) {
      const double a = std::norm(fv[k]);
      const double w = p.sigma == 1.0 ? a : std::pow(a, p.sigma);
      ov[k] += p.lambda * w * fv[k];
    }
  }
  return out;
}

SpanFit fit_constraint_span(const WaveField& target, const WaveField& f, const WaveField& lz_f) {
  Eigen::Matrix2d gram;
  gram(0, 0) = inner_product(f, f).real();
  gram(0, 1) = inner_product(f, lz_f).real();
  gram(1, 0) = gram(0, 1);
  gram(1, 1) = inner_product(lz_f, lz_f).real();
  const Eigen::Vector2d rhs(inner_product(f, target).real(), inner_product(lz_f, target).real());
  if (!(gram(0, 0) > 0.0)) throw InvalidArgument("constraint span of a zero field");

  SpanFit fit;
  const double det = gram.determinant();
  // L_z f negligible (radial f) or parallel to f (single mode): only one combination is identifiable.
  if (gram(1, 1) > 1e-12 * gram(0, 0) && det > 1e-10 * gram(0, 0) * gram(1, 1)) {
    const Eigen::Vector2d c = gram.ldlt().solve(rhs);
    fit.c_f = c(0);
    fit.c_lz = c(1);
    return fit;
  }
  // Rank one: minimal-norm solution through the dominant eigenpair.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(gram);
  const Eigen::Vector2d u = eig.eigenvectors().col(1);
  const double lam = eig.eigenvalues()(1);
  const Eigen::Vector2d c = u * (u.dot(rhs) / lam);
  fit.c_f = c(0);
  fit.c_lz = c(1);
  fit.degenerate = true;
  return fit;
}

Multipliers multipliers_estimate(const WaveField& f, const PhysicsParams& p) {
  if (!(mass(f) > 0.0)) throw InvalidArgument("multipliers of a zero field");
  const WaveField r = euler_lagrange_apply(f, p);
  const WaveField lz_f = apply_Lz(f);
  const SpanFit fit = fit_constraint_span(r, f, lz_f);
  return Multipliers{fit.c_f, fit.c_lz, fit.degenerate};
}

double stationary_residual(const WaveField& f, const PhysicsParams& p, const Multipliers& mu) {
  WaveField r = euler_lagrange_apply(f, p);
  r.axpy(-mu.omega, f);
  r.axpy(-mu.Omega, apply_Lz(f));
  return l2_norm(r) / std::max(1.0, l2_norm(f));
}

double identity_check(const WaveField& f, const PhysicsParams& p, const Constraints& c,
                      const Multipliers& mu) {
  const double e = energy(f, p);
  double lhs = e;
  if (p.lambda != 0.0) lhs += p.lambda * p.sigma / (p.sigma + 1.0) * nonlinear_moment(f, p.sigma);
  return std::abs(lhs - mu.omega * c.m - mu.Omega * c.l) / std::max(1.0, std::abs(e));
}

WaveField reflect_x1(const WaveField& f) {
  const Grid& g = f.grid();
  WaveField out(g);
  for (int a = 0; a < g.n; ++a) {
    for (int b = 0; b < g.n; ++b) out.at(a, b) = f.at(g.n - 1 - a, b);
  }
  return out;
}

}  // namespace rotbound
