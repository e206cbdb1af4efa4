#pragma once

#include <map>
#include <span>
#include <string>

#include "rotbound/field.hpp"
#include "rotbound/functionals.hpp"
#include "rotbound/modes.hpp"

namespace rotbound {

/// Mode masses mu_n of a field; total = M, first moment = L.
struct ModeMassProfile {
  std::map<int, double> mu;

  double total() const;
  double first_moment() const;
};

/// Profile read off an angular decomposition (every retained mode, zeros included).
ModeMassProfile mode_mass_profile(const AngularModes& modes);

enum class FeasibilityStatus {
  kFeasible,
  kEmpty,         // no occupied modes
  kBelowSupport,  // l/m below the smallest occupied mode
  kAboveSupport,  // l/m above the largest occupied mode
};

struct Feasibility {
  FeasibilityStatus status = FeasibilityStatus::kFeasible;
  std::string reason;
  bool ok() const noexcept { return status == FeasibilityStatus::kFeasible; }
};

/// Modes whose mass is at most occupancy * total count as empty.
inline constexpr double kDefaultOccupancy = 1e-12;

/// Reachability of (m, l) by non-negative reweighting of the occupied modes:
/// feasible iff n_min <= l/m <= n_max, where n_min = n_max is only allowed
/// when l/m equals that mode.
Feasibility feasibility(const ModeMassProfile& profile, const Constraints& c,
                        double occupancy = kDefaultOccupancy);
/// Same criterion over arbitrary real mode labels (e.g. Ritz values).
Feasibility feasibility(std::span<const double> labels, std::span<const double> weights,
                        const Constraints& c, double occupancy = kDefaultOccupancy);

/// Masses of the two components hitting M = m and L = l:
/// m1 = (m n2 - l)/(n2 - n1), m2 = (l - m n1)/(n2 - n1).
/// Throws MassSplitNegative unless both are positive, InvalidArgument if n1 == n2.
struct MassSplit {
  double m1 = 0.0;
  double m2 = 0.0;
};
MassSplit mass_split(const Constraints& c, int n1, int n2);

/// Radial envelope of seed components: r^{|n|} exp(-r^2 / (2 width^2)).
struct RadialProfile {
  double width = 1.0;
};

/// amplitude * r^{|n|} exp(-r^2/(2 w^2)) e^{i n phi}, scaled to grid mass `mode_mass`.
WaveField mode_component(const Grid& grid, int n, double mode_mass, const RadialProfile& profile = {});

/// f1 + f2 with f_j a single angular mode n_j carrying the closed-form mass split.
WaveField two_mode_seed(const Grid& grid, const Constraints& c, int n1, int n2,
                        const RadialProfile& profile = {});

/// Exponential tilt mu_n -> mu_n e^{a + b n} hitting both constraints.
struct Tilt {
  double a = 0.0;
  double b = 0.0;
  int iterations = 0;
};
/// Labels/weights with weight <= occupancy * total are rescaled by e^a only.
/// Throws ConstraintInfeasible or NewtonDiverged.
Tilt solve_tilt(std::span<const double> labels, std::span<const double> weights, const Constraints& c,
                double occupancy = kDefaultOccupancy, double tol = 1e-13, int max_iterations = 100);

struct RetractOptions {
  int max_krylov = 48;
  /// Growth of the Krylov space stops once the last coordinate is below tail_tol * |y|.
  double tail_tol = 1e-12;
  double newton_tol = 1e-13;
  int max_newton = 100;
};

struct RetractInfo {
  Tilt tilt;
  int krylov_dim = 0;
};

/// Maps f onto C_{m,l} = {M = m, L = l} by the tilt f -> exp((a + b L_z)/2) f,
/// i.e. c_n -> c_n e^{(a + b n)/2} on every angular mode. The modes are those of
/// the grid operator L_z (its Krylov space from f), so the constraints hold for
/// the grid functionals to roundoff.
WaveField retract(const WaveField& f, const Constraints& c, const RetractOptions& opts = {},
                  RetractInfo* info = nullptr);

/// g - w f - W L_z f with real (w, W) making the result L2-orthogonal (real part)
/// to f and L_z f; minimal-norm coefficients when the pair is degenerate.
WaveField tangent_project(const WaveField& g, const WaveField& f);
WaveField tangent_project(const WaveField& g, const WaveField& f, const WaveField& lz_f);

}  // namespace rotbound
