#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "adiabatica/error.hpp"
#include "adiabatica/semiclassical.hpp"

using namespace adiabatica;
using doctest::Approx;

namespace {

EffectiveModel fixed(double delta, std::function<double(double)> g, std::function<double(double)> dg) {
  EffectiveModel m;
  m.detuning = delta;
  m.coupling = std::move(g);
  m.coupling_rate = std::move(dg);
  return m;
}

TimeSeries uniform(double t0, double t1, std::size_t n, const std::function<double(double)>& f) {
  TimeSeries s;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + (t1 - t0) * double(i) / double(n - 1);
    s.t.push_back(t);
    s.value.push_back(f(t));
  }
  return s;
}

// Upper eigenvector of [[a, b], [b, -a]].
std::array<double, 2> upper_vector(double a, double b) {
  const double phi = 0.5 * std::atan2(b, a);
  return {std::cos(phi), std::sin(phi)};
}

}  // namespace

TEST_CASE("reduction by substitution") {
  ModelParams p;
  p.detuning = 0.5;
  p.photon_number = 4;
  p.mode = ModeShape::gaussian(1.0, 10.0);
  const EffectiveModel m = reduce_by_substitution(p, 2.0, -30.0);
  CHECK(m.detuning == 0.5);
  CHECK(m.coupling(5.0) == Approx(2.0 * p.mode.value(-20.0)));
  CHECK(m.coupling_rate(5.0) == Approx(2.0 * 2.0 * p.mode.first_derivative(-20.0)));
  CHECK(m.provenance == CouplingProvenance::Substitution);

  p.mode = ModeShape::none();
  const EffectiveModel zero = reduce_by_substitution(p, 2.0, 0.0);
  CHECK(time_adiabaticity(zero, 3.0).value == 0.0);
}

TEST_CASE("time adiabaticity examples") {
  const auto constant = fixed(1.0, [](double) { return 0.7; }, [](double) { return 0.0; });
  CHECK(time_adiabaticity(constant, 2.0).value == 0.0);

  // Linear chirp G = c t at the crossing G = 0.
  const double c = 0.3, d = 0.2;
  const auto chirp = fixed(d, [c](double t) { return c * t; }, [c](double) { return c; });
  CHECK(time_adiabaticity(chirp, 0.0).value == Approx(c / (d * d)));
  CHECK(adiabaticity_rate(fixed(-d, chirp.coupling, chirp.coupling_rate), 0.0).value ==
        Approx(-c / (d * d)));

  const auto deg = fixed(0.0, [](double) { return 0.0; }, [](double) { return 1.0; });
  CHECK(time_adiabaticity(deg, 0.0).degenerate);
  CHECK_THROWS_AS(sample_adiabaticity_rate(deg, -1.0, 1.0, 3), DegeneratePointError);
}

TEST_CASE("two-level solver: resonant Rabi oscillation and free phases") {
  const double g = 0.25;
  const auto rabi = fixed(0.0, [g](double) { return g; }, [](double) { return 0.0; });
  const auto out = solve_two_level(rabi, {Complex(1.0), Complex(0.0)}, 0.0, std::numbers::pi / g, 0.01, 10);
  for (const auto& s : out) {
    CHECK(std::norm(s.upper) + std::norm(s.lower) == Approx(1.0).epsilon(1e-10));
    CHECK(std::norm(s.lower) == Approx(std::pow(std::sin(g * s.t), 2)).epsilon(1e-6));
  }
  CHECK(std::norm(out.back().upper) == Approx(1.0).epsilon(1e-6));

  const double d = 0.8;
  const auto free = fixed(d, [](double) { return 0.0; }, [](double) { return 0.0; });
  const auto f = solve_two_level(free, {Complex(0.6), Complex(0.8)}, 0.0, 3.0, 0.01);
  const double t = f.back().t;
  CHECK(t == Approx(3.0));
  CHECK(std::abs(f.back().upper - 0.6 * std::exp(Complex(0.0, -d * t / 2))) <= 1e-12);
  CHECK(std::abs(f.back().lower - 0.8 * std::exp(Complex(0.0, d * t / 2))) <= 1e-12);

  CHECK_THROWS_AS(solve_two_level(rabi, {Complex(1.0), Complex(0.0)}, 0.0, 10.0, 3.0), StepSizeError);
}

TEST_CASE("two-level solver: Landau-Zener sweep") {
  // G = c t sweeps through the avoided crossing of width delta.
  const double c = 1.0, d = 1.0, tmax = 200.0;
  const auto lz = fixed(d, [c](double t) { return c * t; }, [c](double) { return c; });
  const auto u0 = upper_vector(d / 2, -c * tmax);
  const auto out = solve_two_level(lz, {Complex(u0[0]), Complex(u0[1])}, -tmax, tmax, 0.002, 1000);
  const auto u1 = upper_vector(d / 2, c * tmax);
  const double stay = std::norm(u1[0] * out.back().upper + u1[1] * out.back().lower);
  const double jump = std::exp(-std::numbers::pi * d * d / (4 * c));
  CHECK(stay == Approx(1.0 - jump).epsilon(1e-2));
}

TEST_CASE("cumulative integral") {
  const auto s = uniform(0.0, 3.0, 301, [](double t) { return std::cos(t); });
  const auto f = cumulative_integral(s.t, s.value);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f[i] - std::sin(s.t[i])) <= 1e-9);
  auto bad = s;
  bad.t[7] += 1e-3;
  CHECK_THROWS_AS(cumulative_integral(bad.t, bad.value), InvalidArgument);
  CHECK_THROWS_AS(cumulative_integral({0.0, 1.0}, {0.0, 1.0}), InvalidArgument);
}

TEST_CASE("inverse coupling") {
  SUBCASE("zero target keeps the initial coupling") {
    const auto target = uniform(0.0, 10.0, 101, [](double) { return 0.0; });
    const auto inv = inverse_coupling(target, 0.5, 0.0);
    for (double g : inv.coupling) CHECK(g == 0.0);
    const auto inv2 = inverse_coupling(target, 0.5, 0.3);
    for (double g : inv2.coupling) CHECK(g == Approx(0.3).epsilon(1e-14));
  }
  SUBCASE("round trip through a substituted model") {
    ModelParams p;
    p.detuning = 0.4;
    p.mode = ModeShape::gaussian(1.0, 10.0);
    const EffectiveModel m = reduce_by_substitution(p, 1.0, -40.0);
    const auto target = sample_adiabaticity_rate(m, 0.0, 80.0, 4001);
    const auto inv = inverse_coupling(target, p.detuning, m.coupling(0.0));
    double worst = 0.0;
    for (std::size_t i = 0; i < inv.t.size(); ++i) worst = std::max(worst, std::abs(inv.coupling[i] - m.coupling(inv.t[i])));
    CHECK(worst <= 1e-8);
    CHECK(back_substitution_residual(inv, target) <= 1e-6);
    const EffectiveModel back = inv.model();
    CHECK(back.provenance == CouplingProvenance::InverseConstructed);
    CHECK(back.coupling(40.0) == Approx(m.coupling(40.0)).epsilon(1e-6));
  }
  SUBCASE("constant target diverges at the critical time") {
    const double a = 0.05, d = 0.5;
    const auto target = uniform(0.0, 100.0, 1001, [a](double) { return a; });
    try {
      inverse_coupling(target, d, 0.0);
      FAIL("expected InversionDomainError");
    } catch (const InversionDomainError& e) {
      CHECK(e.critical_time() == Approx(1.0 / (2 * d * a)).epsilon(1e-6));
    }
    const auto shorter = uniform(0.0, 15.0, 301, [a](double) { return a; });
    const auto inv = inverse_coupling(shorter, d, 0.0);
    for (std::size_t i = 0; i < inv.t.size(); ++i) {
      const double f = a * inv.t[i];
      CHECK(inv.coupling[i] == Approx(d * d * f / std::sqrt(1 - 4 * d * d * f * f)).epsilon(1e-10));
    }
    const auto naive = naive_inverse_coupling(shorter, d);
    CHECK(std::abs(naive.back() - inv.coupling.back()) > 1e-3);
  }
  CHECK_THROWS_AS(inverse_coupling(uniform(0.0, 1.0, 11, [](double) { return 0.0; }), 0.0), InvalidArgument);
}

TEST_CASE("classical trajectories") {
  SUBCASE("free flight without coupling") {
    ModelParams p;
    p.detuning = 1.0;
    const auto paths = classical_trajectories(p, {{{-10.0, 2.0}, {-10.0, 2.0}}}, 5.0, 0.01);
    CHECK(paths[0].back().x == Approx(0.0).epsilon(1e-10));
    CHECK(paths[1].back().p == 2.0);
    CHECK(paths[0].back().energy == Approx(2.0 + 0.5));
    CHECK(paths[1].back().energy == Approx(2.0 - 0.5));
    const auto a = trajectory_adiabaticity(p, paths, {1.0, 0.0});
    for (double v : a.value) CHECK(v == 0.0);
  }
  SUBCASE("upper channel is slowed by a coupling bump, lower is sped up") {
    ModelParams p;
    p.detuning = 0.5;
    p.mode = ModeShape::gaussian(10.0, 5.0);
    const auto paths = classical_trajectories(p, {{{-30.0, 1.5}, {-30.0, 1.5}}}, 20.0, 0.005, 10);
    double pmin = 1e9, pmax = 0.0;
    for (const auto& s : paths[0]) pmin = std::min(pmin, s.p);
    for (const auto& s : paths[1]) pmax = std::max(pmax, s.p);
    CHECK(pmin < 1.4);
    CHECK(pmax > 1.6);
    for (int ch = 0; ch < 2; ++ch) {
      const double e0 = paths[ch].front().energy;
      for (const auto& s : paths[ch]) CHECK(std::abs(s.energy - e0) <= 1e-6);
    }
  }
  SUBCASE("step guard") {
    ModelParams p;
    p.detuning = 0.1;
    p.mode = ModeShape::gaussian(10.0, 0.5);
    CHECK_THROWS_AS(classical_trajectories(p, {{{-3.0, 1.0}, {-3.0, 1.0}}}, 10.0, 1.0), StepSizeError);
  }
}

TEST_CASE("csv writers") {
  std::ostringstream out;
  write_effective_model_csv(out, {0.0, 1.0}, {0.5, 0.25});
  CHECK(out.str().rfind("t,G\n", 0) == 0);
  std::ostringstream cl;
  ModelParams p;
  p.detuning = 1.0;
  write_classical_csv(cl, classical_trajectories(p, {{{0.0, 1.0}, {0.0, 1.0}}}, 0.1, 0.05));
  CHECK(cl.str().rfind("t,x_up,p_up,energy_up,x_down,p_down,energy_down\n", 0) == 0);
}
