#include "rotbound/spectral.hpp"

#include <numbers>

#include "rotbound/fft.hpp"

namespace rotbound {

std::vector<double> wavenumbers(const Grid& grid, bool drop_nyquist) {
  const int n = grid.n;
  const double dk = 2.0 * std::numbers::pi / (n * grid.spacing());
  std::vector<double> k(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const int signed_j = j <= n / 2 ? j : j - n;
    k[static_cast<std::size_t>(j)] = dk * signed_j;
  }
  if (drop_nyquist) k[static_cast<std::size_t>(n / 2)] = 0.0;
  return k;
}

std::pair<WaveField, WaveField> gradient_spectral(const WaveField& f) {
  const Grid& g = f.grid();
  const auto& fft = Fft2d::for_size(g.n);
  const auto k = wavenumbers(g, true);
  WaveField spectrum = f;
  fft.forward(spectrum.values());
  WaveField d1(g);
  WaveField d2(g);
  const cplx I(0.0, 1.0);
  for (int a = 0; a < g.n; ++a) {
    for (int b = 0; b < g.n; ++b) {
      const cplx s = spectrum.at(a, b);
      d1.at(a, b) = I * k[a] * s;
      d2.at(a, b) = I * k[b] * s;
    }
  }
  fft.backward(d1.values());
  fft.backward(d2.values());
  return {std::move(d1), std::move(d2)};
}

WaveField laplacian(const WaveField& f) {
  const Grid& g = f.grid();
  const auto& fft = Fft2d::for_size(g.n);
  const auto k = wavenumbers(g, false);
  WaveField out = f;
  fft.forward(out.values());
  for (int a = 0; a < g.n; ++a) {
    for (int b = 0; b < g.n; ++b) out.at(a, b) *= -(k[a] * k[a] + k[b] * k[b]);
  }
  fft.backward(out.values());
  return out;
}

double gradient_norm_sq(const WaveField& f) {
  const Grid& g = f.grid();
  const auto& fft = Fft2d::for_size(g.n);
  const auto k = wavenumbers(g, false);
  WaveField spectrum = f;
  fft.forward(spectrum.values());
  double acc = 0.0;
  for (int a = 0; a < g.n; ++a) {
    for (int b = 0; b < g.n; ++b) acc += (k[a] * k[a] + k[b] * k[b]) * std::norm(spectrum.at(a, b));
  }
  // Parseval: h^2 sum |f|^2 = h^2 / n^2 sum |F|^2.
  return acc * g.cell_area() / (static_cast<double>(g.n) * g.n);
}

WaveField apply_Lz(const WaveField& f) {
  const Grid& g = f.grid();
  auto [d1, d2] = gradient_spectral(f);
  WaveField out(g);
  const cplx minus_i(0.0, -1.0);
  for (int a = 0; a < g.n; ++a) {
    const double x1 = g.coord(a);
    for (int b = 0; b < g.n; ++b) {
      const double x2 = g.coord(b);
      out.at(a, b) = minus_i * (x1 * d2.at(a, b) - x2 * d1.at(a, b));
    }
  }
  return out;
}

}  // namespace rotbound
