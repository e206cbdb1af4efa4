#pragma once

#include <cmath>
#include <random>

#include "rotbound/field.hpp"
#include "rotbound/grid.hpp"

namespace testing {

using rotbound::cplx;
using rotbound::Grid;
using rotbound::WaveField;

inline WaveField gaussian(const Grid& g, double width = 1.0, double x0 = 0.0, double y0 = 0.0) {
  return WaveField::from_function(g, [&](double x, double y) {
    const double dx = x - x0;
    const double dy = y - y0;
    return cplx(std::exp(-0.5 * (dx * dx + dy * dy) / (width * width)), 0.0);
  });
}

// (x1 + i x2)^n e^{-r^2/2}, an exact L_z eigenfunction in the continuum.
inline WaveField vortex(const Grid& g, int n, double width = 1.0) {
  return WaveField::from_function(g, [&](double x, double y) {
    return std::pow(cplx(x, n >= 0 ? y : -y), std::abs(n)) * std::exp(-0.5 * (x * x + y * y) / (width * width));
  });
}

// Smooth confined field with pseudo-random low-order content.
inline WaveField random_smooth(const Grid& g, std::mt19937_64& rng, double width = 1.2) {
  std::normal_distribution<double> nd;
  cplx c[3][3];
  for (auto& row : c) {
    for (auto& v : row) v = cplx(nd(rng), nd(rng));
  }
  return WaveField::from_function(g, [&](double x, double y) {
    cplx acc = 0.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) acc += c[a][b] * std::pow(x, a) * std::pow(y, b);
    }
    return acc * std::exp(-0.5 * (x * x + y * y) / (width * width));
  });
}

}  // namespace testing
