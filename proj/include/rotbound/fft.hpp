#pragma once

#include <complex>
#include <span>

namespace rotbound {

/// In-place 2D complex DFT of an n x n row-major array, backed by FFTW.
/// Plans are created once per size (FFTW_ESTIMATE, so results are
/// reproducible run to run) and shared; execution is thread-safe.
class Fft2d {
 public:
  static const Fft2d& for_size(int n);

  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  int n() const noexcept { return n_; }

  /// Unnormalised forward transform, sum_x f(x) e^{-i k.x}.
  void forward(std::span<std::complex<double>> data) const;
  /// Inverse transform including the 1/n^2 factor.
  void backward(std::span<std::complex<double>> data) const;

 private:
  explicit Fft2d(int n);

  int n_;
  void* forward_plan_;
  void* backward_plan_;
};

/// The same transform in long double. Double-precision FFTs carry a small
/// systematic norm bias (about 1e-16 per transform pair once the spectrum is
/// rephased), which a 10^4-step unitary evolution accumulates into a visible
/// mass drift; the time stepper uses this variant for its kinetic substep.
class Fft2dExtended {
 public:
  static const Fft2dExtended& for_size(int n);

  ~Fft2dExtended();
  Fft2dExtended(const Fft2dExtended&) = delete;
  Fft2dExtended& operator=(const Fft2dExtended&) = delete;

  /// Unnormalised forward and backward transforms (no 1/n^2 factor on either).
  void forward(std::span<std::complex<long double>> data) const;
  void backward(std::span<std::complex<long double>> data) const;

 private:
  explicit Fft2dExtended(int n);

  int n_;
  void* forward_plan_;
  void* backward_plan_;
};

}  // namespace rotbound
