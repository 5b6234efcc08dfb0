// Serial reference kernels against their OpenMP counterparts, plus whole propagation steps.
// Arguments: grid size N (each spinor holds 2N amplitudes).

#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "adiabatica/kernels.hpp"
#include "adiabatica/metrics.hpp"
#include "adiabatica/propagator.hpp"

namespace {

using namespace adiabatica;

std::vector<Complex> random_complex(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<Complex> v(n);
  for (auto& z : v) z = {d(rng), d(rng)};
  return v;
}

std::vector<double> random_real(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Pointwise unitary factors keep repeated application away from overflow and denormals.
struct Unitary {
  std::vector<Complex> m11, m12, m22;
  std::vector<double> c, s;
};

Unitary random_unitary(std::size_t n, unsigned seed) {
  const auto phi = random_real(n, seed);
  Unitary u;
  for (double a : phi) {
    u.c.push_back(std::cos(a));
    u.s.push_back(std::sin(a));
    u.m11.push_back(std::cos(a));
    u.m12.push_back(Complex(0.0, -std::sin(a)));
    u.m22.push_back(std::cos(a));
  }
  return u;
}

template <ExecutionPolicy P>
void BM_apply_symmetric(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = random_complex(n, 1), b = random_complex(n, 2);
  const Unitary u = random_unitary(n, 3);
  for (auto _ : state) {
    kernels::apply_symmetric(P, a, b, u.m11, u.m12, u.m22);
    benchmark::DoNotOptimize(a.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <ExecutionPolicy P>
void BM_rotate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = random_complex(n, 1), b = random_complex(n, 2);
  const Unitary u = random_unitary(n, 3);
  bool t = false;
  for (auto _ : state) {
    kernels::rotate(P, a, b, u.c, u.s, t);
    t = !t;
    benchmark::DoNotOptimize(a.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <ExecutionPolicy P>
void BM_weighted_inner(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_complex(n, 1), b = random_complex(n, 2);
  const auto w = random_real(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::weighted_inner(P, a, w, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

ModelParams bench_model() {
  ModelParams p;
  p.detuning = 0.5;
  p.mode = ModeShape::gaussian(10.0, 50.0);
  return p;
}

template <ExecutionPolicy P>
void BM_exact_step(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto grid = make_grid(n, -400.0, 400.0);
  const ExactPropagator prop(bench_model(), grid, 0.02, P);
  SpinorField f = make_gaussian_bare_state(grid, -200.0, 5.0, 10.0);
  for (auto _ : state) prop.advance(f, 10);
  state.SetItemsProcessed(state.iterations() * 10);
}

template <ExecutionPolicy P>
void BM_adiabatic_step(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto grid = make_grid(n, -400.0, 400.0);
  const ModelParams p = bench_model();
  const AdiabaticFrame frame = AdiabaticFrame::build(p, grid);
  const AdiabaticPropagator prop(frame, p, 0.02, P);
  SpinorField f = to_adiabatic(make_gaussian_bare_state(grid, -200.0, 5.0, 10.0), frame);
  for (auto _ : state) prop.advance(f, 10);
  state.SetItemsProcessed(state.iterations() * 10);
}

template <ExecutionPolicy P>
void BM_exact_At(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto grid = make_grid(n, -400.0, 400.0);
  const ModelParams p = bench_model();
  const AdiabaticFrame frame = AdiabaticFrame::build(p, grid);
  const SpinorField f = to_adiabatic(make_gaussian_bare_state(grid, -20.0, 5.0, 10.0), frame);
  const ChannelWeights w{0.5, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(exact_At(f, frame, p, w, true, P).value);
}

constexpr auto kSerial = ExecutionPolicy::Serial;
constexpr auto kParallel = ExecutionPolicy::Parallel;

}  // namespace

BENCHMARK(BM_apply_symmetric<kSerial>)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(BM_apply_symmetric<kParallel>)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(BM_rotate<kSerial>)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(BM_rotate<kParallel>)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(BM_weighted_inner<kSerial>)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(BM_weighted_inner<kParallel>)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(BM_exact_step<kSerial>)->Arg(1 << 11)->Arg(1 << 13)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_exact_step<kParallel>)->Arg(1 << 11)->Arg(1 << 13)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_adiabatic_step<kSerial>)->Arg(1 << 11)->Arg(1 << 13)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_adiabatic_step<kParallel>)->Arg(1 << 11)->Arg(1 << 13)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_exact_At<kSerial>)->Arg(1 << 12)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_exact_At<kParallel>)->Arg(1 << 12)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
