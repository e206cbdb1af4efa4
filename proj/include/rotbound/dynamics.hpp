#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rotbound/field.hpp"
#include "rotbound/functionals.hpp"
#include "rotbound/krylov.hpp"

namespace rotbound {

/// One Strang step of i u_t = -lap u/2 + V u + lambda |u|^{2 sigma} u:
/// half potential/nonlinear phase, kinetic phase e^{-i dt |k|^2/2}, half phase.
WaveField step_strang(const WaveField& f, double dt, const PhysicsParams& p);

/// Reusable stepper (kinetic phases and the trap table are computed once).
/// The kinetic substep runs in long double; a stepper owns a work buffer and
/// must not be shared between threads.
class StrangStepper {
 public:
  StrangStepper(const Grid& grid, double dt, const PhysicsParams& p);
  void step(WaveField& f) const;
  double dt() const noexcept { return dt_; }

 private:
  void kick(WaveField& f, double tau) const;

  Grid grid_;
  double dt_;
  PhysicsParams p_;
  std::shared_ptr<const std::vector<double>> potential_;
  /// e^{-i dt |k|^2 / 2} / n^2, so the backward transform needs no rescaling.
  std::vector<std::complex<long double>> kinetic_;
  mutable std::vector<std::complex<long double>> work_;
};

struct OrbitReference {
  WaveField phi;
  Multipliers multipliers;
  Constraints constraints;
};

/// Distance to the orbit {e^{i theta} R_alpha phi} in the norm
/// |g|^2 = |g|^2_{L2} + |grad g|^2 + int V |g|^2, where R_alpha multiplies
/// angular mode n by e^{i n alpha}, i.e. R_alpha = exp(i alpha L_z). Quarter turns are
/// exact grid permutations; the remainder |beta| <= pi/4 is evaluated on the Ritz pairs
/// of the Krylov space of phi (no grid interpolation).
class OrbitMetric {
 public:
  OrbitMetric(const WaveField& phi, const PhysicsParams& p, int max_krylov = 96);

  struct Match {
    double distance = 0.0;
    double theta = 0.0;
    double alpha = 0.0;
  };
  Match match(const WaveField& u) const;
  double distance(const WaveField& u) const { return match(u).distance; }

  /// R_alpha phi.
  WaveField rotated(double alpha) const;
  int krylov_dim() const noexcept { return krylov_.dim(); }

 private:
  // Krylov coordinates of p(L_z) e^{i alpha L_z} phi for p(theta) = (i theta)^order.
  std::vector<cplx> coords(double alpha, int order) const;

  PhysicsParams p_;
  LzKrylov krylov_;
  std::vector<double> theta_;
  std::vector<cplx> gram_;  // <v_i, (1 + V - lap) v_j>, row-major
};

/// Applies 1 + V - lap, so that <g, apply_h1_operator(h)> is the H1-type inner product.
WaveField apply_h1_operator(const WaveField& f, const PhysicsParams& p);
double h1_norm(const WaveField& f, const PhysicsParams& p);

double orbit_distance(const WaveField& u, const OrbitReference& ref, const PhysicsParams& p);

struct EvolveOptions {
  double T = 10.0;
  double dt = 1e-3;
  int record_stride = 100;
};

struct EvolveTrace {
  std::vector<double> times;
  /// |M(t) - M(0)| / M(0), |E(t) - E(0)| / max(1, |E(0)|), |L(t) - L(0)| / max(|L(0)|, M(0)).
  std::vector<double> mass_drift;
  std::vector<double> energy_drift;
  std::vector<double> angmom_drift;
  /// Empty unless a reference orbit was supplied.
  std::vector<double> orbit_distance;
  WaveField final_field;
};

/// Throws InvalidArgument for T <= 0, dt <= 0 or dt > 1e-2, BlowUp on non-finite values.
EvolveTrace evolve(const WaveField& f0, const PhysicsParams& p, const EvolveOptions& opts,
                   const OrbitReference* ref = nullptr);

/// Smooth random field: Fourier modes with |k| <= k_cut and random phases and
/// amplitudes, times exp(-|x|^2 / (2 width^2)), scaled to H1-type norm epsilon.
WaveField random_perturbation(const Grid& grid, const PhysicsParams& p, double epsilon, std::uint64_t seed,
                              double k_cut = 4.0, double width = 1.5);

struct StabilityReport {
  double sup_distance = 0.0;
  double initial_distance = 0.0;
  EvolveTrace trace;
};

StabilityReport stability_experiment(const OrbitReference& ref, double epsilon, const PhysicsParams& p,
                                     const EvolveOptions& opts, std::uint64_t seed);

}  // namespace rotbound
