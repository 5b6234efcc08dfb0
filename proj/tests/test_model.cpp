#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adiabatica/error.hpp"
#include "adiabatica/model.hpp"

using namespace adiabatica;
using doctest::Approx;

namespace {

ModelParams make(double detuning, ModeShape mode, FrameCase frame = FrameCase::Case1, int n = 1) {
  ModelParams p;
  p.detuning = detuning;
  p.mode = mode;
  p.frame = frame;
  p.photon_number = n;
  return p;
}

}  // namespace

TEST_CASE("bare potential examples") {
  SUBCASE("case1, zero coupling") {
    const auto v = bare_potential(make(1.0, ModeShape::none()), 3.0);
    CHECK(v.upper == 0.5);
    CHECK(v.lower == -0.5);
    CHECK(v.coupling == 0.0);
  }
  SUBCASE("case1, resonant gaussian at the centre") {
    const auto v = bare_potential(make(0.0, ModeShape::gaussian(1.0, 50.0)), 0.0);
    CHECK(v.coupling == Approx(1.0 / (std::sqrt(2.0 * std::numbers::pi) * 50.0)).epsilon(1e-15));
    CHECK(v.upper == 0.0);
    CHECK(v.lower == 0.0);
  }
  SUBCASE("case2, n = 1") {
    const auto v = bare_potential(make(2.0, ModeShape::none(), FrameCase::Case2), 0.0);
    CHECK(v.upper == 0.0);
    CHECK(v.lower == -2.0);
  }
  SUBCASE("coupling carries sqrt(n)") {
    const auto v = bare_potential(make(1.0, ModeShape::standing_wave(0.5, 1.0), FrameCase::Case1, 9), 0.7);
    CHECK(v.coupling == Approx(3.0 * 0.5 * std::sin(0.7)).epsilon(1e-15));
  }
}

TEST_CASE("mixing angle examples") {
  CHECK(mixing_angle(make(1.0, ModeShape::none()), 2.0).value == 0.0);

  const auto sw = make(2.0, ModeShape::standing_wave(1.0, 1.0));
  CHECK(mixing_angle(sw, std::numbers::pi / 2).value == Approx(0.5 * std::atan(1.0)).epsilon(1e-14));

  const auto tiny = make(1e-12, ModeShape::gaussian(1.0, 50.0));
  CHECK(mixing_angle(tiny, 0.0).value == Approx(std::numbers::pi / 4).epsilon(1e-9));

  // Negative splitting: theta is continuous through a node of G.
  const auto neg = make(-1.0, ModeShape::standing_wave(1.0, 1.0));
  CHECK(std::abs(mixing_angle(neg, 1e-9).value - mixing_angle(neg, -1e-9).value) <= 1e-8);
  CHECK(mixing_angle(neg, 0.0).value == Approx(std::numbers::pi / 2));

  const auto deg = mixing_angle(make(0.0, ModeShape::standing_wave(1.0, 1.0)), 0.0);
  CHECK(deg.degenerate);
}

TEST_CASE("adiabatic eigenvalue examples") {
  auto l = adiabatic_eigenvalues(make(1.0, ModeShape::none()), 0.0);
  CHECK(l.upper == 0.5);
  CHECK(l.lower == -0.5);

  const auto res = make(0.0, ModeShape::gaussian(1.0, 50.0));
  l = adiabatic_eigenvalues(res, 20.0);
  CHECK(l.upper == Approx(res.coupling(20.0)).epsilon(1e-14));
  CHECK(l.lower == Approx(-res.coupling(20.0)).epsilon(1e-14));

  l = adiabatic_eigenvalues(make(1.0, ModeShape::none(), FrameCase::Case2), 0.0);
  CHECK(l.upper == Approx(0.0).epsilon(1e-15));
  CHECK(l.lower == -1.0);
}

TEST_CASE("large detuning effective potential") {
  CHECK(effective_potential_large_detuning(make(5.0, ModeShape::none()), 1.0) == 0.0);
  const double one = effective_potential_large_detuning(make(5.0, ModeShape::gaussian(1.0, 3.0)), 1.0);
  const double four =
      effective_potential_large_detuning(make(5.0, ModeShape::gaussian(1.0, 3.0), FrameCase::Case1, 4), 1.0);
  CHECK(four / one == Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(effective_potential_large_detuning(make(0.0, ModeShape::gaussian(1.0, 3.0)), 1.0),
                  InvalidArgument);
}

TEST_CASE("theta derivative examples") {
  CHECK(dtheta(make(1.0, ModeShape::gaussian(1.0, 50.0)), 0.0).value == 0.0);
  CHECK(dtheta(make(2.0, ModeShape::standing_wave(1.0, 1.0)), 0.0).value == Approx(0.5).epsilon(1e-15));
  CHECK(dtheta(make(0.0, ModeShape::standing_wave(1.0, 1.0)), 0.4).value == 0.0);
  CHECK(dtheta(make(0.0, ModeShape::standing_wave(1.0, 1.0)), 0.0).degenerate);
  CHECK(d2theta(make(0.0, ModeShape::standing_wave(1.0, 1.0)), 0.0).degenerate);
}

TEST_CASE("frame invariants hold for both cases") {
  for (FrameCase fc : {FrameCase::Case1, FrameCase::Case2}) {
    for (double d : {-2.0, 0.05, 3.0}) {
      const auto p = make(d, ModeShape::standing_wave(1.3, 0.7), fc, 3);
      for (int i = 0; i <= 400; ++i) {
        const double x = -10.0 + 0.05 * i;
        const auto v = bare_potential(p, x);
        const auto th = mixing_angle(p, x);
        const auto r = rotate_to_adiabatic(v, th.value);
        const auto l = adiabatic_eigenvalues(p, x);
        CHECK(std::abs(r.coupling) <= 1e-13);
        CHECK(r.upper == Approx(l.upper).epsilon(1e-13));
        CHECK(r.lower == Approx(l.lower).epsilon(1e-13));
        CHECK(l.upper + l.lower == Approx(p.upper_energy() + p.lower_energy()).epsilon(1e-13));
        CHECK(l.upper >= l.lower);
      }
    }
  }
}

TEST_CASE("splitting is independent of the frame") {
  auto c1 = make(0.7, ModeShape::gaussian(2.0, 5.0), FrameCase::Case1, 5);
  auto c2 = c1;
  c2.frame = FrameCase::Case2;
  CHECK(c1.splitting() == c2.splitting());
  CHECK(c2.mean_energy() == Approx(-0.7 * 4.5));
  for (int i = 0; i <= 200; ++i) {
    const double x = -20.0 + 0.2 * i;
    const auto a = adiabatic_eigenvalues(c1, x);
    const auto b = adiabatic_eigenvalues(c2, x);
    CHECK(std::abs((a.upper - a.lower) - (b.upper - b.lower)) <= 1e-13);
  }
}

TEST_CASE("theta derivatives match finite differences") {
  const double h = 1e-3;
  for (const auto& p : {make(0.8, ModeShape::gaussian(3.0, 4.0)), make(-1.5, ModeShape::standing_wave(1.0, 0.9)),
                        make(0.2, ModeShape::linear(0.3))}) {
    double worst1 = 0.0, worst2 = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double x = -5.0 + 0.1 * i;
      const double tm = mixing_angle(p, x - h).value;
      const double t0 = mixing_angle(p, x).value;
      const double tp = mixing_angle(p, x + h).value;
      worst1 = std::max(worst1, std::abs((tp - tm) / (2 * h) - dtheta(p, x).value));
      worst2 = std::max(worst2, std::abs((tp - 2 * t0 + tm) / (h * h) - d2theta(p, x).value));
    }
    CHECK(worst1 <= 1e-5);
    CHECK(worst2 <= 1e-4);
  }
}

TEST_CASE("large-detuning asymptote of the upper surface") {
  const auto p = make(50.0, ModeShape::gaussian(1.0, 1.0));
  const double gmax = p.coupling(0.0);
  REQUIRE(std::abs(p.detuning) >= 50.0 * gmax);
  for (int i = 0; i <= 200; ++i) {
    const double x = -4.0 + 0.04 * i;
    const double g = p.coupling(x);
    const double approx = p.mean_energy() + p.detuning / 2 + g * g / p.detuning;
    const double bound = 2.0 * std::pow(g, 4) / std::pow(std::abs(p.detuning), 3);
    CHECK(std::abs(adiabatic_eigenvalues(p, x).upper - approx) <= bound + 1e-15 * std::abs(p.detuning));
  }
}

TEST_CASE("mode shapes and derivatives") {
  const ModeShape g = ModeShape::gaussian(2.0, 3.0);
  const double x = 1.7;
  const double v = g.value(x);
  CHECK(v == Approx(2.0 / (std::sqrt(2 * std::numbers::pi) * 3.0) * std::exp(-x * x / 18.0)));
  CHECK(g.first_derivative(x) == Approx(-x / 9.0 * v));
  CHECK(g.second_derivative(x) == Approx((x * x / 81.0 - 1.0 / 9.0) * v));

  const ModeShape s = ModeShape::standing_wave(1.5, 2.0);
  CHECK(s.first_derivative(0.3) == Approx(3.0 * std::cos(0.6)));
  CHECK(s.second_derivative(0.3) == Approx(-6.0 * std::sin(0.6)));

  // Tabulated samples of a periodic function reproduce its spectral derivatives.
  const std::size_t n = 256;
  const double len = 2 * std::numbers::pi;
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) samples[i] = std::sin(len * double(i) / double(n));
  const TabulatedMode tab(0.0, len / double(n), samples);
  const ModeShape t(tab);
  CHECK_FALSE(t.is_analytic());
  const double xs = len * 17.0 / double(n);
  CHECK(t.value(xs) == Approx(std::sin(xs)).epsilon(1e-12));
  CHECK(t.first_derivative(xs) == Approx(std::cos(xs)).epsilon(1e-10));
  CHECK(t.second_derivative(xs) == Approx(-std::sin(xs)).epsilon(1e-10));
}

TEST_CASE("parameter validation") {
  ModelParams p = make(1.0, ModeShape::gaussian(1.0, 5.0));
  p.mass = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p.mass = 1.0;
  p.photon_number = 0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p.photon_number = 1;
  p.mode = ModeShape::gaussian(1.0, -2.0);
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}
