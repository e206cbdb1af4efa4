#pragma once

#include <vector>

#include "rotbound/field.hpp"

namespace rotbound {

/// Lanczos process for the grid operator L_z started from a field f.
///
/// The discrete L_z is Hermitian, so the Krylov space of f carries an
/// orthonormal basis V and a projected Hermitian matrix V^H L_z V whose
/// eigenpairs (Ritz pairs) play the role of the angular modes of f: Ritz
/// values cluster at the integers n, and the Ritz weights are the mode
/// masses. Functions of L_z applied to f are then evaluated as
/// |f| V U diag(g(theta)) U^H e_1, and for any coefficient vector y the
/// grid functionals satisfy M(V y) = |y|^2 and L(V y) = y^H (V^H L_z V) y
/// exactly up to roundoff, independent of how far the process has run.
class LzKrylov {
 public:
  /// breakdown_tol is relative to max(1, |L_z v_j|).
  LzKrylov(const WaveField& start, int max_dim, double breakdown_tol = 1e-11);

  /// Adds one basis vector; false once the space is invariant or full.
  bool extend();
  /// Extends until dim() >= target or no further growth is possible.
  void extend_to(int target);

  int dim() const noexcept { return static_cast<int>(basis_.size()); }
  bool exhausted() const noexcept { return exhausted_; }
  double start_norm() const noexcept { return start_norm_; }
  const std::vector<WaveField>& basis() const noexcept { return basis_; }

  /// Ritz values (ascending) and weights |f|^2 |U_{0j}|^2 of the current space.
  const std::vector<double>& ritz_values() const;
  const std::vector<double>& ritz_weights() const;

  /// Krylov coordinates of g(L_z) f for per-Ritz-pair factors g(theta_j).
  std::vector<cplx> coordinates(const std::vector<cplx>& factors) const;
  /// V y.
  WaveField synthesize(const std::vector<cplx>& coords) const;

 private:
  void refresh() const;

  std::vector<WaveField> basis_;
  std::vector<WaveField> images_;  // L_z applied to each basis vector
  double start_norm_ = 0.0;
  int max_dim_;
  double breakdown_tol_;
  bool exhausted_ = false;

  mutable bool fresh_ = false;
  mutable std::vector<std::vector<cplx>> columns_;  // upper triangle of V^H L_z V
  mutable std::vector<double> ritz_values_;
  mutable std::vector<double> ritz_weights_;
  mutable std::vector<cplx> ritz_vectors_;  // column-major dim x dim
};

}  // namespace rotbound
