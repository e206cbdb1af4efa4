#pragma once

#include <memory>
#include <vector>

#include "rotbound/field.hpp"

namespace rotbound {

/// Nonlinearity and trap: V(x) = trap * |x|^k, nonlinear term lambda |u|^{2 sigma} u.
struct PhysicsParams {
  double lambda = 1.0;
  double sigma = 1.0;
  double k = 4.0;
  /// Prefactor of the trap. Always 1 outside test harnesses (free-flow checks set 0).
  double trap = 1.0;
  static constexpr int dim = 2;
};

/// Throws ValidationError unless k > 2 and (lambda, sigma) is admissible in
/// d = 2: lambda < 0 needs sigma < 1; lambda > 0 needs sigma <= 4 (numerical cap).
void validate(const PhysicsParams& p);

struct Constraints {
  double m = 1.0;
  double l = 0.0;
};

/// omega: mass multiplier (chemical potential); Omega: angular-momentum multiplier.
struct Multipliers {
  double omega = 0.0;
  double Omega = 0.0;
  /// Set when f and L_z f are (numerically) parallel, so only omega + n Omega is identifiable.
  bool degenerate = false;
};

/// V sampled on the grid (cached per grid / exponent / prefactor).
std::shared_ptr<const std::vector<double>> potential_table(const Grid& grid, const PhysicsParams& p);

double mass(const WaveField& f);
/// int |f|^{2 sigma + 2}.
double nonlinear_moment(const WaveField& f, double sigma);
double potential_energy(const WaveField& f, const PhysicsParams& p);
/// 1/2 |grad f|^2 + int V |f|^2 + lambda/(sigma+1) int |f|^{2 sigma + 2}.
double energy(const WaveField& f, const PhysicsParams& p);
/// E(g) - E(f) evaluated from the difference g - f, which keeps its
/// relative accuracy when the two energies agree to many digits.
double energy_difference(const WaveField& f, const WaveField& g, const PhysicsParams& p);

/// Re <f, L_z f>. Throws NumericalError when the imaginary part exceeds 1e-10 * mass(f).
double angular_momentum(const WaveField& f);
/// E(f) - Omega * L(f).
double rotating_energy(const WaveField& f, const PhysicsParams& p, double Omega);

/// H f = -1/2 lap f + V f.
WaveField apply_hamiltonian(const WaveField& f, const PhysicsParams& p);
/// -1/2 lap f + V f + lambda |f|^{2 sigma} f; dE(f)[h] = 2 Re <h, this>.
WaveField euler_lagrange_apply(const WaveField& f, const PhysicsParams& p);

/// Real least-squares coefficients of target against span{f, L_z f}.
struct SpanFit {
  double c_f = 0.0;
  double c_lz = 0.0;
  bool degenerate = false;
};
SpanFit fit_constraint_span(const WaveField& target, const WaveField& f, const WaveField& lz_f);

/// Least-squares (omega, Omega) for euler_lagrange_apply(f) ~ omega f + Omega L_z f.
Multipliers multipliers_estimate(const WaveField& f, const PhysicsParams& p);

/// |EL(f) - omega f - Omega L_z f| / max(1, |f|).
double stationary_residual(const WaveField& f, const PhysicsParams& p, const Multipliers& mu);

/// |E(f) + lambda sigma/(sigma+1) |f|_{2 sigma+2}^{2 sigma+2} - omega m - Omega l| / max(1, |E(f)|).
double identity_check(const WaveField& f, const PhysicsParams& p, const Constraints& c,
                      const Multipliers& mu);

/// (T f)(x1, x2) = f(-x1, x2). Preserves M and E, flips L.
WaveField reflect_x1(const WaveField& f);

}  // namespace rotbound
