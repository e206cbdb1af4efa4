#include "rotbound/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "rotbound/errors.hpp"

namespace rotbound {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }
fftwl_complex* as_fftwl(std::complex<long double>* p) { return reinterpret_cast<fftwl_complex*>(p); }

}  // namespace

Fft2d::Fft2d(int n) : n_(n) {
  // FFTW's planner is not re-entrant; the caller holds planner_mutex().
  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n) * n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_2d(n, n, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                   FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft_2d(n, n, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                    FFTW_BACKWARD, flags);
  if (forward_plan_ == nullptr || backward_plan_ == nullptr) {
    throw Error("FFTW failed to create a plan for n = " + std::to_string(n));
  }
}

Fft2d::~Fft2d() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

const Fft2d& Fft2d::for_size(int n) {
  // The mutex must outlive the cache, whose destructor takes it.
  std::mutex& mutex = planner_mutex();
  static std::map<int, std::unique_ptr<Fft2d>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::unique_ptr<Fft2d>(new Fft2d(n))).first;
  }
  return *it->second;
}

void Fft2d::forward(std::span<std::complex<double>> data) const {
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data.data()),
                   as_fftw(data.data()));
}

void Fft2d::backward(std::span<std::complex<double>> data) const {
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(data.data()),
                   as_fftw(data.data()));
  const double scale = 1.0 / (static_cast<double>(n_) * n_);
  for (auto& v : data) v *= scale;
}

Fft2dExtended::Fft2dExtended(int n) : n_(n) {
  std::vector<std::complex<long double>> scratch(static_cast<std::size_t>(n) * n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftwl_plan_dft_2d(n, n, as_fftwl(scratch.data()), as_fftwl(scratch.data()),
                                    FFTW_FORWARD, flags);
  backward_plan_ = fftwl_plan_dft_2d(n, n, as_fftwl(scratch.data()), as_fftwl(scratch.data()),
                                     FFTW_BACKWARD, flags);
  if (forward_plan_ == nullptr || backward_plan_ == nullptr) {
    throw Error("FFTW failed to create a long double plan for n = " + std::to_string(n));
  }
}

Fft2dExtended::~Fft2dExtended() {
  std::lock_guard lock(planner_mutex());
  fftwl_destroy_plan(static_cast<fftwl_plan>(forward_plan_));
  fftwl_destroy_plan(static_cast<fftwl_plan>(backward_plan_));
}

const Fft2dExtended& Fft2dExtended::for_size(int n) {
  std::mutex& mutex = planner_mutex();
  static std::map<int, std::unique_ptr<Fft2dExtended>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::unique_ptr<Fft2dExtended>(new Fft2dExtended(n))).first;
  }
  return *it->second;
}

void Fft2dExtended::forward(std::span<std::complex<long double>> data) const {
  if (data.size() != static_cast<std::size_t>(n_) * n_) throw InvalidArgument("FFT buffer has the wrong size");
  fftwl_execute_dft(static_cast<fftwl_plan>(forward_plan_), as_fftwl(data.data()), as_fftwl(data.data()));
}

void Fft2dExtended::backward(std::span<std::complex<long double>> data) const {
  if (data.size() != static_cast<std::size_t>(n_) * n_) throw InvalidArgument("FFT buffer has the wrong size");
  fftwl_execute_dft(static_cast<fftwl_plan>(backward_plan_), as_fftwl(data.data()), as_fftwl(data.data()));
}

}  // namespace rotbound
