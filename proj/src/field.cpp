#include "rotbound/field.hpp"

namespace rotbound {

WaveField::WaveField(const Grid& grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("field sample count does not match grid size");
  }
}

WaveField WaveField::from_function(const Grid& grid,
                                   const std::function<cplx(double, double)>& fn) {
  WaveField f(grid);
  for (int i = 0; i < grid.n; ++i) {
    const double x1 = grid.coord(i);
    for (int j = 0; j < grid.n; ++j) f.at(i, j) = fn(x1, grid.coord(j));
  }
  return f;
}

bool WaveField::all_finite() const noexcept {
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

WaveField& WaveField::operator+=(const WaveField& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

WaveField& WaveField::operator-=(const WaveField& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

WaveField& WaveField::operator*=(cplx s) noexcept {
  for (auto& v : values_) v *= s;
  return *this;
}

WaveField& WaveField::axpy(cplx s, const WaveField& other) {
  require_same_grid(*this, other);
  // Interleaved (re, im) doubles; spelled out so the loop vectorizes.
  double* y = reinterpret_cast<double*>(values_.data());
  const double* x = reinterpret_cast<const double*>(other.values_.data());
  const double sr = s.real();
  const double si = s.imag();
  for (std::size_t k = 0; k < 2 * values_.size(); k += 2) {
    const double xr = x[k];
    const double xi = x[k + 1];
    y[k] += sr * xr - si * xi;
    y[k + 1] += sr * xi + si * xr;
  }
  return *this;
}

cplx inner_product(const WaveField& f, const WaveField& g) {
  require_same_grid(f, g);
  const auto a = f.values();
  const auto b = g.values();
  // Four independent partial sums in a fixed order: fast and still deterministic.
  double re[4] = {0.0, 0.0, 0.0, 0.0};
  double im[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t size = a.size();
  std::size_t k = 0;
  for (; k + 4 <= size; k += 4) {
    for (std::size_t j = 0; j < 4; ++j) {
      // conj(a) * b
      re[j] += a[k + j].real() * b[k + j].real() + a[k + j].imag() * b[k + j].imag();
      im[j] += a[k + j].real() * b[k + j].imag() - a[k + j].imag() * b[k + j].real();
    }
  }
  for (; k < size; ++k) {
    re[0] += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
    im[0] += a[k].real() * b[k].imag() - a[k].imag() * b[k].real();
  }
  const double sum_re = (re[0] + re[1]) + (re[2] + re[3]);
  const double sum_im = (im[0] + im[1]) + (im[2] + im[3]);
  const double w = f.grid().cell_area();
  return {w * sum_re, w * sum_im};
}

double l2_norm(const WaveField& f) { return std::sqrt(inner_product(f, f).real()); }

double mass_outside_radius(const WaveField& f, double rho) {
  const Grid& g = f.grid();
  const double rho2 = rho * rho;
  double acc = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double x1 = g.coord(i);
    for (int j = 0; j < g.n; ++j) {
      const double x2 = g.coord(j);
      if (x1 * x1 + x2 * x2 > rho2) acc += std::norm(f.at(i, j));
    }
  }
  return g.cell_area() * acc;
}

}  // namespace rotbound
