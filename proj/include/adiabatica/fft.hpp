#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace adiabatica {

using Complex = std::complex<double>;

/// Allocator returning FFTW-aligned storage, so every buffer matches the alignment
/// the plans were created with.
template <class T>
struct FftwAllocator {
  using value_type = T;

  FftwAllocator() noexcept = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}

  T* allocate(std::size_t n);
  void deallocate(T* p, std::size_t) noexcept;

  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

void* fftw_aligned_alloc(std::size_t bytes);
void fftw_aligned_free(void* p) noexcept;

template <class T>
T* FftwAllocator<T>::allocate(std::size_t n) {
  return static_cast<T*>(fftw_aligned_alloc(n * sizeof(T)));
}

template <class T>
void FftwAllocator<T>::deallocate(T* p, std::size_t) noexcept {
  fftw_aligned_free(p);
}

using ComplexVector = std::vector<Complex, FftwAllocator<Complex>>;

/// Unnormalized forward/backward DFT pair for `batch` contiguous transforms of length n.
///
/// Plans are created once (FFTW_ESTIMATE, so the chosen algorithm and therefore the
/// rounding are reproducible) and executed through the new-array interface, which
/// makes `forward`/`backward` safe to call concurrently on distinct buffers.
class FourierTransform {
 public:
  FourierTransform(std::size_t n, std::size_t batch = 1);
  ~FourierTransform();

  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t batch() const noexcept { return batch_; }

  /// In-place transforms; `data.size()` must equal size() * batch().
  void forward(std::span<Complex> data) const;
  void backward(std::span<Complex> data) const;

 private:
  std::size_t n_;
  std::size_t batch_;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

/// Spectral derivative of order `order` of periodic samples with spacing dx.
std::vector<double> spectral_derivative(std::span<const double> samples, double dx, int order);

}  // namespace adiabatica
