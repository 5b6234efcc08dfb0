#include "adiabatica/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <new>
#include <numbers>

#include "adiabatica/error.hpp"

namespace adiabatica {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

void* fftw_aligned_alloc(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void fftw_aligned_free(void* p) noexcept { fftw_free(p); }

FourierTransform::FourierTransform(std::size_t n, std::size_t batch) : n_(n), batch_(batch) {
  if (n == 0 || batch == 0) throw InvalidArgument("FourierTransform: empty transform");
  ComplexVector scratch(n * batch);
  const int len = static_cast<int>(n);
  const int howmany = static_cast<int>(batch);
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_many_dft(1, &len, howmany, as_fftw(scratch.data()), nullptr, 1, len,
                                     as_fftw(scratch.data()), nullptr, 1, len, FFTW_FORWARD,
                                     FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_many_dft(1, &len, howmany, as_fftw(scratch.data()), nullptr, 1, len,
                                      as_fftw(scratch.data()), nullptr, 1, len, FFTW_BACKWARD,
                                      FFTW_ESTIMATE);
  if (forward_plan_ == nullptr || backward_plan_ == nullptr) {
    throw Error("FourierTransform: FFTW planning failed");
  }
}

FourierTransform::~FourierTransform() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void FourierTransform::forward(std::span<Complex> data) const {
  if (data.size() != n_ * batch_) throw InvalidArgument("FourierTransform: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data.data()),
                   as_fftw(data.data()));
}

void FourierTransform::backward(std::span<Complex> data) const {
  if (data.size() != n_ * batch_) throw InvalidArgument("FourierTransform: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(data.data()),
                   as_fftw(data.data()));
}

std::vector<double> spectral_derivative(std::span<const double> samples, double dx, int order) {
  const std::size_t n = samples.size();
  if (n < 2 || dx <= 0.0 || order < 0) throw InvalidArgument("spectral_derivative: bad input");
  FourierTransform fft(n);
  ComplexVector buf(samples.begin(), samples.end());
  fft.forward(buf);
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * dx);
  for (std::size_t j = 0; j < n; ++j) {
    const auto signed_j = j <= n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
    double k = signed_j * dk;
    // The Nyquist mode has no well-defined odd derivative.
    if (n % 2 == 0 && j == n / 2 && order % 2 == 1) k = 0.0;
    Complex factor(1.0 / static_cast<double>(n), 0.0);
    for (int i = 0; i < order; ++i) factor *= Complex(0.0, k);
    buf[j] *= factor;
  }
  fft.backward(buf);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = buf[j].real();
  return out;
}

}  // namespace adiabatica
