#include "adiabatica/kernels.hpp"

#include <omp.h>

#include <cassert>
#include <vector>

namespace adiabatica {

namespace kernels {

namespace {

// Plain complex product without the inf/NaN recovery call of operator*.
inline Complex mul(Complex x, Complex y) {
  return {x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real()};
}

}  // namespace

namespace serial {

void multiply(std::span<Complex> data, std::span<const Complex> factor) {
  assert(data.size() == factor.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = mul(data[i], factor[i]);
}

void apply_symmetric(std::span<Complex> a, std::span<Complex> b, std::span<const Complex> m11,
                     std::span<const Complex> m12, std::span<const Complex> m22) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Complex u = a[i];
    const Complex v = b[i];
    a[i] = mul(m11[i], u) + mul(m12[i], v);
    b[i] = mul(m12[i], u) + mul(m22[i], v);
  }
}

void rotate(std::span<Complex> a, std::span<Complex> b, std::span<const double> c,
            std::span<const double> s, bool transpose) {
  const double sign = transpose ? -1.0 : 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Complex u = a[i];
    const Complex v = b[i];
    const double si = sign * s[i];
    a[i] = c[i] * u + si * v;
    b[i] = -si * u + c[i] * v;
  }
}

double density(std::span<const Complex> a) {
  double sum = 0.0;
  for (const Complex& z : a) sum += std::norm(z);
  return sum;
}

double weighted_density(std::span<const Complex> a, std::span<const double> w) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += w[i] * std::norm(a[i]);
  return sum;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  Complex sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += mul(std::conj(a[i]), b[i]);
  return sum;
}

Complex weighted_inner(std::span<const Complex> a, std::span<const double> w,
                       std::span<const Complex> b) {
  Complex sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += mul(std::conj(a[i]) * w[i], b[i]);
  return sum;
}

}  // namespace serial

namespace parallel {

namespace {

// Sum of body(i) over [0, n), computed per block and combined in block order.
template <class T, class Body>
T blocked_sum(std::size_t n, Body body) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<T> partial(blocks, T{});
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(blocks); ++blk) {
    const std::size_t begin = static_cast<std::size_t>(blk) * kReductionBlock;
    const std::size_t end = std::min(n, begin + kReductionBlock);
    T sum{};
    for (std::size_t i = begin; i < end; ++i) sum += body(i);
    partial[static_cast<std::size_t>(blk)] = sum;
  }
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

}  // namespace

void multiply(std::span<Complex> data, std::span<const Complex> factor) {
  assert(data.size() == factor.size());
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] = mul(data[i], factor[i]);
}

void apply_symmetric(std::span<Complex> a, std::span<Complex> b, std::span<const Complex> m11,
                     std::span<const Complex> m12, std::span<const Complex> m22) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Complex u = a[i];
    const Complex v = b[i];
    a[i] = mul(m11[i], u) + mul(m12[i], v);
    b[i] = mul(m12[i], u) + mul(m22[i], v);
  }
}

void rotate(std::span<Complex> a, std::span<Complex> b, std::span<const double> c,
            std::span<const double> s, bool transpose) {
  const double sign = transpose ? -1.0 : 1.0;
  const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Complex u = a[i];
    const Complex v = b[i];
    const double si = sign * s[i];
    a[i] = c[i] * u + si * v;
    b[i] = -si * u + c[i] * v;
  }
}

double density(std::span<const Complex> a) {
  return blocked_sum<double>(a.size(), [a](std::size_t i) { return std::norm(a[i]); });
}

double weighted_density(std::span<const Complex> a, std::span<const double> w) {
  return blocked_sum<double>(a.size(), [a, w](std::size_t i) { return w[i] * std::norm(a[i]); });
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  return blocked_sum<Complex>(a.size(), [a, b](std::size_t i) { return mul(std::conj(a[i]), b[i]); });
}

Complex weighted_inner(std::span<const Complex> a, std::span<const double> w,
                       std::span<const Complex> b) {
  return blocked_sum<Complex>(a.size(),
                              [a, w, b](std::size_t i) { return mul(std::conj(a[i]) * w[i], b[i]); });
}

}  // namespace parallel

void multiply(ExecutionPolicy p, std::span<Complex> data, std::span<const Complex> factor) {
  p == ExecutionPolicy::Parallel ? parallel::multiply(data, factor) : serial::multiply(data, factor);
}

void apply_symmetric(ExecutionPolicy p, std::span<Complex> a, std::span<Complex> b,
                     std::span<const Complex> m11, std::span<const Complex> m12,
                     std::span<const Complex> m22) {
  p == ExecutionPolicy::Parallel ? parallel::apply_symmetric(a, b, m11, m12, m22)
                                 : serial::apply_symmetric(a, b, m11, m12, m22);
}

void rotate(ExecutionPolicy p, std::span<Complex> a, std::span<Complex> b,
            std::span<const double> c, std::span<const double> s, bool transpose) {
  p == ExecutionPolicy::Parallel ? parallel::rotate(a, b, c, s, transpose)
                                 : serial::rotate(a, b, c, s, transpose);
}

double density(ExecutionPolicy p, std::span<const Complex> a) {
  return p == ExecutionPolicy::Parallel ? parallel::density(a) : serial::density(a);
}

double weighted_density(ExecutionPolicy p, std::span<const Complex> a, std::span<const double> w) {
  return p == ExecutionPolicy::Parallel ? parallel::weighted_density(a, w)
                                        : serial::weighted_density(a, w);
}

Complex inner(ExecutionPolicy p, std::span<const Complex> a, std::span<const Complex> b) {
  return p == ExecutionPolicy::Parallel ? parallel::inner(a, b) : serial::inner(a, b);
}

Complex weighted_inner(ExecutionPolicy p, std::span<const Complex> a, std::span<const double> w,
                       std::span<const Complex> b) {
  return p == ExecutionPolicy::Parallel ? parallel::weighted_inner(a, w, b)
                                        : serial::weighted_inner(a, w, b);
}

}  // namespace kernels

void set_thread_limit(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int thread_limit() { return omp_get_max_threads(); }

}  // namespace adiabatica
