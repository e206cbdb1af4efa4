#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rotbound/constraint_set.hpp"
#include "rotbound/field.hpp"
#include "rotbound/functionals.hpp"

namespace rotbound {

/// Angular modes of a two-mode seed. n1 == n2 denotes a single-mode seed.
struct SeedPair {
  int n1 = 0;
  int n2 = 0;
};

struct SolveOptions {
  /// Initial step; the preconditioned direction is O(1), so steps of order one are natural.
  double step = 1.0;
  double max_step = 1000.0;
  int max_iters = 20000;
  /// Stop once the tangent-projected gradient norm drops below this.
  double tol_grad = 1e-5;
  /// An accepted step decreasing E by less than tol_energy * max(1, |E|) counts as stalled;
  /// stall_window consecutive stalled steps end the run.
  double tol_energy = 1e-15;
  int stall_window = 200;
  /// Largest |n| retained by angular diagnostics.
  int n_max = 8;
  std::vector<SeedPair> seeds = {{-1, 1}, {0, 1}, {0, 2}, {-1, 2}};
  /// Iterations every start receives before only the most promising one is continued.
  int race_iters = 40;
  /// Fraction of the mass spread over modes |n| <= admixture_modes with random phases,
  /// so that the nonlinearity can couple every mode class.
  double seed_admixture = 0.05;
  int admixture_modes = 4;
  std::uint64_t rng_seed = 42;
  /// alpha in the preconditioner (alpha + V + lambda|f|^{2 sigma})^{-1/2} (alpha - lap/2)^{-1} (...)^{-1/2}.
  double preconditioner_shift = 20.0;
  bool conjugate = true;
  bool keep_history = true;
};

/// Throws ValidationError on non-positive tolerances or max_iters < 1.
void validate(const SolveOptions& opts);

struct IterationRecord {
  int iter = 0;
  double energy = 0.0;
  double mass_err = 0.0;
  double angmom_err = 0.0;
  double grad_norm = 0.0;
};

struct MinimizeReport {
  WaveField field;
  /// e(m, l) for the doubly constrained problem, e_Omega(m) for the mass-only one.
  double energy_value = 0.0;
  Multipliers multipliers;
  double residual = 0.0;
  double identity_gap = 0.0;
  double grad_norm = 0.0;
  /// residual / grad_norm at the final iterate.
  double residual_ratio = 0.0;
  /// L of the final field (l_Omega for the mass-only problem).
  double angular_momentum = 0.0;
  std::vector<IterationRecord> history;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;
  std::string seed_used;
  /// Wall time of the whole multi-start solve.
  double seconds = 0.0;
};

/// Minimizes E over {M = m, L = l} by preconditioned projected conjugate
/// gradients with the exponential-tilt retraction. Starts: every seed in
/// opts.seeds that can carry (m, l), a pure mode-n seed when l = n m, and
/// `initial` when given. All starts run opts.race_iters iterations, then the
/// lowest-energy one is run to convergence (the next ones only if it fails).
/// Throws NoFeasibleSeed when nothing can be started.
MinimizeReport minimize_doubly(const PhysicsParams& p, const Grid& grid, const Constraints& c,
                               const SolveOptions& opts,
                               const std::optional<WaveField>& initial = std::nullopt);

/// Minimizes E - Omega L over {M = m}. Same scheme with the mass rescale as retraction.
MinimizeReport minimize_mass_only(const PhysicsParams& p, const Grid& grid, double m, double Omega,
                                  const SolveOptions& opts,
                                  const std::optional<WaveField>& initial = std::nullopt);

/// Seed for (m, l) built on a mode pair, mirrored (x1 -> -x1) when l < 0.
/// Returns nullopt when the pair cannot carry the constraints.
std::optional<WaveField> seed_field(const Grid& grid, const Constraints& c, SeedPair pair,
                                    const SolveOptions& opts, std::uint64_t stream);

enum class ScanMode {
  kWarm,  // each point also starts from its predecessor's minimizer
  kCold,  // seeds only
};

struct EnergyCurve {
  double m = 0.0;
  std::vector<double> l_values;
  std::vector<double> e_values;
  std::vector<MinimizeReport> reports;
};

EnergyCurve scan_l(const PhysicsParams& p, const Grid& grid, double m, const std::vector<double>& l_grid,
                   const SolveOptions& opts, ScanMode mode = ScanMode::kWarm);

struct LegendreReport {
  double gap = 0.0;
  double argmin_l = 0.0;
  int inequality_violations = 0;
};

/// gap = |e_omega - min over l >= 0 of (e(m, l) - Omega l)|; violations count grid
/// points with e(m, l) - Omega l < e_omega - 1e-6 max(1, |e_omega|).
/// Throws InvalidArgument on an empty curve or one without l >= 0.
LegendreReport legendre_check(const EnergyCurve& curve, double e_omega, double Omega);

}  // namespace rotbound
