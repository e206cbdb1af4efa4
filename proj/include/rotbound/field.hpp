#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "rotbound/errors.hpp"
#include "rotbound/grid.hpp"

namespace rotbound {

using cplx = std::complex<double>;

/// Complex samples of a wave function on a Grid, row-major over (x1, x2).
class WaveField {
 public:
  WaveField() = default;
  explicit WaveField(const Grid& grid) : grid_(grid), values_(grid.size()) {}
  WaveField(const Grid& grid, std::vector<cplx> values);

  /// Samples fn(x1, x2) at every grid node.
  static WaveField from_function(const Grid& grid,
                                 const std::function<cplx(double, double)>& fn);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<cplx> values() noexcept { return values_; }
  std::span<const cplx> values() const noexcept { return values_; }

  cplx& operator[](std::size_t k) noexcept { return values_[k]; }
  const cplx& operator[](std::size_t k) const noexcept { return values_[k]; }
  cplx& at(int i1, int i2) noexcept { return values_[grid_.index(i1, i2)]; }
  const cplx& at(int i1, int i2) const noexcept { return values_[grid_.index(i1, i2)]; }

  bool all_finite() const noexcept;

  WaveField& operator+=(const WaveField& other);
  WaveField& operator-=(const WaveField& other);
  WaveField& operator*=(cplx s) noexcept;
  /// this += s * other
  WaveField& axpy(cplx s, const WaveField& other);

  friend WaveField operator+(WaveField a, const WaveField& b) { return a += b; }
  friend WaveField operator-(WaveField a, const WaveField& b) { return a -= b; }
  friend WaveField operator*(cplx s, WaveField a) { return a *= s; }
  friend WaveField operator*(WaveField a, cplx s) { return a *= s; }

 private:
  Grid grid_{};
  std::vector<cplx> values_;
};

inline void require_same_grid(const WaveField& a, const WaveField& b) {
  if (!(a.grid() == b.grid()) || a.size() != b.size()) throw GridMismatch();
}

/// <f, g> = h^2 * sum conj(f) g; conjugate-linear in f.
cplx inner_product(const WaveField& f, const WaveField& g);

/// Discrete L2 norm, sqrt(<f, f>).
double l2_norm(const WaveField& f);

/// h^2 * sum of |f|^2 over nodes with |x| > rho.
double mass_outside_radius(const WaveField& f, double rho);

}  // namespace rotbound
