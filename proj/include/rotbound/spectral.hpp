#pragma once

#include <utility>
#include <vector>

#include "rotbound/field.hpp"

namespace rotbound {

/// Angular wavenumbers 2*pi*j/(n*h) in FFT order. When drop_nyquist is set
/// the j = n/2 entry is zeroed, which keeps first derivatives real
/// antisymmetric (and hence L_z Hermitian on the grid).
std::vector<double> wavenumbers(const Grid& grid, bool drop_nyquist);

/// (d f/d x1, d f/d x2) by Fourier differentiation with periodic wrap.
std::pair<WaveField, WaveField> gradient_spectral(const WaveField& f);

/// Spectral Laplacian with symbol -|k|^2 (Nyquist kept).
WaveField laplacian(const WaveField& f);

/// ||grad f||^2 evaluated with the Laplacian symbol, i.e. -<f, lap f>.
double gradient_norm_sq(const WaveField& f);

/// L_z f = -i (x1 d_{x2} f - x2 d_{x1} f).
WaveField apply_Lz(const WaveField& f);

}  // namespace rotbound
