#pragma once

#include <span>
#include <vector>

#include "rotbound/field.hpp"

namespace rotbound {

/// Angular Fourier decomposition f(r, phi) = sum_n c_n(r) e^{i n phi},
/// sampled on Gauss-Legendre radii in [0, r_max]. Mass and mean angular
/// momentum are diagonal here: M = sum_n mu_n, L = sum_n n mu_n.
struct AngularModes {
  int n_max = 0;
  double r_max = 0.0;
  int angular_points = 0;
  std::vector<double> radii;
  /// Quadrature weights for the measure r dr on [0, r_max].
  std::vector<double> radial_weights;
  /// coeffs[n + n_max][i] = c_n(radii[i]).
  std::vector<std::vector<cplx>> coeffs;

  std::span<const cplx> mode(int n) const { return coeffs.at(static_cast<std::size_t>(n + n_max)); }
  std::span<cplx> mode(int n) { return coeffs.at(static_cast<std::size_t>(n + n_max)); }

  /// mu_n = 2 pi int |c_n(r)|^2 r dr.
  double mode_mass(int n) const;
  double total_mass() const;
  /// Fraction of the retained mass outside mode n.
  double fraction_outside(int n) const;
};

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

/// Resamples f on n/2 polar rings (Gauss-Legendre radii on [0, extent]) and
/// max(4 n_max, n/2) angles using the field's band-limited (trigonometric)
/// interpolant, then takes an angular DFT on every ring.
/// Throws InvalidArgument when n_max > n/4.
AngularModes to_modes(const WaveField& f, int n_max);

/// Angular synthesis onto the Cartesian nodes; radial values come from
/// barycentric interpolation between the rings. Nodes beyond r_max get 0.
WaveField from_modes(const AngularModes& modes, const Grid& grid);

}  // namespace rotbound
