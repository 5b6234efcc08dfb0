#pragma once

// Pointwise and reduction kernels over grid arrays.
//
// Every kernel exists twice: `serial::` is the plain reference loop, `parallel::` the
// OpenMP version. Parallel reductions sum fixed-size blocks and combine the partial sums
// in block order, so their result does not depend on the number of threads.

#include <complex>
#include <cstddef>
#include <span>

namespace adiabatica {

using Complex = std::complex<double>;

enum class ExecutionPolicy { Serial, Parallel };

namespace kernels {

/// Block length used by the parallel reductions.
inline constexpr std::size_t kReductionBlock = 1024;

namespace serial {
/// data[i] *= factor[i]
void multiply(std::span<Complex> data, std::span<const Complex> factor);
/// (a, b)[i] <- [[m11, m12], [m12, m22]][i] (a, b)[i], a complex symmetric 2x2 per point.
void apply_symmetric(std::span<Complex> a, std::span<Complex> b, std::span<const Complex> m11,
                     std::span<const Complex> m12, std::span<const Complex> m22);
/// (a, b)[i] <- [[c, s], [-s, c]] (a, b)[i]; pass negated s for the transpose.
void rotate(std::span<Complex> a, std::span<Complex> b, std::span<const double> c,
            std::span<const double> s, bool transpose);
/// sum |a|^2
double density(std::span<const Complex> a);
/// sum w |a|^2
double weighted_density(std::span<const Complex> a, std::span<const double> w);
/// sum conj(a) b
Complex inner(std::span<const Complex> a, std::span<const Complex> b);
/// sum conj(a) w b
Complex weighted_inner(std::span<const Complex> a, std::span<const double> w,
                       std::span<const Complex> b);
}  // namespace serial

namespace parallel {
void multiply(std::span<Complex> data, std::span<const Complex> factor);
void apply_symmetric(std::span<Complex> a, std::span<Complex> b, std::span<const Complex> m11,
                     std::span<const Complex> m12, std::span<const Complex> m22);
void rotate(std::span<Complex> a, std::span<Complex> b, std::span<const double> c,
            std::span<const double> s, bool transpose);
double density(std::span<const Complex> a);
double weighted_density(std::span<const Complex> a, std::span<const double> w);
Complex inner(std::span<const Complex> a, std::span<const Complex> b);
Complex weighted_inner(std::span<const Complex> a, std::span<const double> w,
                       std::span<const Complex> b);
}  // namespace parallel

// Policy dispatch.
void multiply(ExecutionPolicy p, std::span<Complex> data, std::span<const Complex> factor);
void apply_symmetric(ExecutionPolicy p, std::span<Complex> a, std::span<Complex> b,
                     std::span<const Complex> m11, std::span<const Complex> m12,
                     std::span<const Complex> m22);
void rotate(ExecutionPolicy p, std::span<Complex> a, std::span<Complex> b,
            std::span<const double> c, std::span<const double> s, bool transpose);
double density(ExecutionPolicy p, std::span<const Complex> a);
double weighted_density(ExecutionPolicy p, std::span<const Complex> a, std::span<const double> w);
Complex inner(ExecutionPolicy p, std::span<const Complex> a, std::span<const Complex> b);
Complex weighted_inner(ExecutionPolicy p, std::span<const Complex> a, std::span<const double> w,
                       std::span<const Complex> b);

}  // namespace kernels

/// Caps the OpenMP team size used by parallel kernels and sweeps (0 = runtime default).
void set_thread_limit(int threads);
int thread_limit();

}  // namespace adiabatica
