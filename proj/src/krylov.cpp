#include "rotbound/krylov.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "rotbound/spectral.hpp"

namespace rotbound {

LzKrylov::LzKrylov(const WaveField& start, int max_dim, double breakdown_tol)
    : max_dim_(std::max(1, max_dim)), breakdown_tol_(breakdown_tol) {
  start_norm_ = l2_norm(start);
  if (!(start_norm_ > 0.0)) throw InvalidArgument("Krylov start field is zero");
  WaveField v0 = start;
  v0 *= 1.0 / start_norm_;
  images_.push_back(apply_Lz(v0));
  basis_.push_back(std::move(v0));
  exhausted_ = max_dim_ == 1;
}

bool LzKrylov::extend() {
  if (exhausted_) return false;
  if (dim() >= max_dim_) {
    exhausted_ = true;
    return false;
  }
  WaveField w = images_.back();
  const double scale = std::max(1.0, l2_norm(w));
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& v : basis_) w.axpy(-inner_product(v, w), v);
  }
  const double beta = l2_norm(w);
  if (!(beta > breakdown_tol_ * scale)) {
    exhausted_ = true;
    return false;
  }
  w *= 1.0 / beta;
  images_.push_back(apply_Lz(w));
  basis_.push_back(std::move(w));
  fresh_ = false;
  return true;
}

void LzKrylov::extend_to(int target) {
  while (dim() < target && extend()) {
  }
}

void LzKrylov::refresh() const {
  if (fresh_) return;
  const int k = dim();
  // Columns of V^H L_z V are cached; only the new ones are computed.
  for (int j = static_cast<int>(columns_.size()); j < k; ++j) {
    std::vector<cplx> col(static_cast<std::size_t>(j) + 1);
    for (int i = 0; i <= j; ++i) {
      col[static_cast<std::size_t>(i)] =
          inner_product(basis_[static_cast<std::size_t>(i)], images_[static_cast<std::size_t>(j)]);
    }
    col.back() = col.back().real();
    columns_.push_back(std::move(col));
  }
  Eigen::MatrixXcd h(k, k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i <= j; ++i) {
      const cplx v = columns_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  ritz_values_.assign(static_cast<std::size_t>(k), 0.0);
  ritz_weights_.assign(static_cast<std::size_t>(k), 0.0);
  ritz_vectors_.assign(static_cast<std::size_t>(k) * k, 0.0);
  const double n2 = start_norm_ * start_norm_;
  for (int j = 0; j < k; ++j) {
    ritz_values_[static_cast<std::size_t>(j)] = eig.eigenvalues()(j);
    ritz_weights_[static_cast<std::size_t>(j)] = n2 * std::norm(eig.eigenvectors()(0, j));
    for (int i = 0; i < k; ++i) {
      ritz_vectors_[static_cast<std::size_t>(j) * k + i] = eig.eigenvectors()(i, j);
    }
  }
  fresh_ = true;
}

const std::vector<double>& LzKrylov::ritz_values() const {
  refresh();
  return ritz_values_;
}

const std::vector<double>& LzKrylov::ritz_weights() const {
  refresh();
  return ritz_weights_;
}

std::vector<cplx> LzKrylov::coordinates(const std::vector<cplx>& factors) const {
  refresh();
  const int k = dim();
  if (static_cast<int>(factors.size()) != k) throw InvalidArgument("one factor per Ritz pair expected");
  std::vector<cplx> y(static_cast<std::size_t>(k), 0.0);
  for (int j = 0; j < k; ++j) {
    const cplx* u = &ritz_vectors_[static_cast<std::size_t>(j) * k];
    const cplx c = start_norm_ * factors[static_cast<std::size_t>(j)] * std::conj(u[0]);
    for (int i = 0; i < k; ++i) y[static_cast<std::size_t>(i)] += u[i] * c;
  }
  return y;
}

WaveField LzKrylov::synthesize(const std::vector<cplx>& coords) const {
  WaveField out(basis_.front().grid());
  for (std::size_t i = 0; i < coords.size() && i < basis_.size(); ++i) out.axpy(coords[i], basis_[i]);
  return out;
}

}  // namespace rotbound
