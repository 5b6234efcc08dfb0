#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "adiabatica/error.hpp"
#include "adiabatica/fft.hpp"
#include "adiabatica/grid.hpp"

using namespace adiabatica;
using doctest::Approx;

TEST_CASE("grid construction and guards") {
  const Grid g(1024, -50.0, 50.0);
  CHECK(g.dx() == Approx(100.0 / 1024));
  CHECK(g.dk() == Approx(2 * std::numbers::pi / 100.0));
  CHECK(g.nyquist() == Approx(std::numbers::pi / g.dx()));
  CHECK(g.positions().front() == -50.0);
  CHECK(g.momenta()[0] == 0.0);
  CHECK(g.momenta()[1] == Approx(g.dk()));
  CHECK(g.momenta()[1023] == Approx(-g.dk()));
  CHECK_THROWS_AS(Grid(1000, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Grid(2, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Grid(64, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("gaussian bare state moments") {
  auto grid = make_grid(4096, -400.0, 400.0);
  const SpinorField f = make_gaussian_bare_state(grid, -200.0, 5.0, 10.0);
  CHECK(f.population(Channel::Upper) == Approx(1.0).epsilon(1e-12));
  CHECK(f.population(Channel::Lower) == 0.0);
  CHECK(expectation(f, Channel::Upper, Observable::Position).real() == Approx(-200.0).epsilon(1e-12));
  CHECK(expectation(f, Channel::Upper, Observable::Momentum).real() == Approx(5.0).epsilon(1e-12));
  const Complex p2 = expectation(f, Channel::Upper, Observable::MomentumSquared);
  CHECK(p2.real() == Approx(25.0 + 1.0 / (2.0 * 100.0)).epsilon(1e-12));
  CHECK(std::abs(p2.imag()) <= 1e-10);
  CHECK(position_variance(f, Channel::Upper) == Approx(50.0).epsilon(1e-12));
  const DensityMoments m = total_position_moments(f);
  CHECK(m.mean == Approx(-200.0));
  CHECK(m.variance == Approx(50.0));
}

TEST_CASE("domain guard for the initial packet") {
  auto grid = make_grid(1024, -100.0, 100.0);
  CHECK_THROWS_AS(make_gaussian_bare_state(grid, -60.0, 0.0, 10.0), DomainGuardError);
  CHECK_NOTHROW(make_gaussian_bare_state(grid, -50.0, 0.0, 10.0));
  CHECK_THROWS_AS(make_gaussian_bare_state(grid, 0.0, 0.0, -1.0), InvalidArgument);
}

TEST_CASE("parseval and fourier round trip") {
  auto grid = make_grid(2048, -100.0, 100.0);
  SpinorField f = make_gaussian_state(grid, 3.0, -2.0, 4.0, Basis::Bare, Complex(0.6, 0.0), Complex(0.0, 0.8));
  CHECK(std::abs(momentum_norm(f) - f.norm()) <= 1e-10);

  const std::vector<Complex> before(f.data().begin(), f.data().end());
  grid->pair_transform().forward(f.data());
  grid->pair_transform().backward(f.data());
  const double n = double(grid->size());
  double worst = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i) worst = std::max(worst, std::abs(f.data()[i] / n - before[i]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("spectral derivative of a periodic function") {
  const std::size_t n = 128;
  const double len = 4 * std::numbers::pi;
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = std::cos(3.0 * len * double(i) / double(n) / 2.0);
  const auto d1 = spectral_derivative(s, len / double(n), 1);
  const auto d2 = spectral_derivative(s, len / double(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = len * double(i) / double(n);
    CHECK(d1[i] == Approx(-1.5 * std::sin(1.5 * x)).epsilon(1e-10));
    CHECK(d2[i] == Approx(-2.25 * std::cos(1.5 * x)).epsilon(1e-10));
  }
}

TEST_CASE("frame rotation examples") {
  auto grid = make_grid(256, -20.0, 20.0);
  SUBCASE("theta = 0 is the identity") {
    ModelParams p;
    p.detuning = 1.0;
    const AdiabaticFrame frame = AdiabaticFrame::build(p, grid);
    const SpinorField f = make_gaussian_state(grid, 0.0, 1.0, 2.0, Basis::Bare, 0.6, 0.8);
    const SpinorField a = to_adiabatic(f, frame);
    CHECK(a.basis() == Basis::Adiabatic);
    for (std::size_t i = 0; i < f.data().size(); ++i) CHECK(a.data()[i] == f.data()[i]);
  }
  SUBCASE("theta = pi/4 maps (1, 0) to (cos, -sin)") {
    ModelParams p;
    p.detuning = 0.0;
    p.mode = ModeShape::gaussian(1e6, 1e6);  // G > 0 everywhere, Delta = 0
    const AdiabaticFrame frame = AdiabaticFrame::build(p, grid);
    const SpinorField f = make_gaussian_bare_state(grid, 0.0, 0.0, 2.0);
    const SpinorField a = to_adiabatic(f, frame);
    const double c = std::cos(std::numbers::pi / 4);
    for (std::size_t i = 0; i < grid->size(); ++i) {
      CHECK(std::abs(a.upper()[i] - c * f.upper()[i]) <= 1e-15);
      CHECK(std::abs(a.lower()[i] + c * f.upper()[i]) <= 1e-15);
    }
  }
  SUBCASE("round trip and basis checks") {
    ModelParams p;
    p.detuning = 0.3;
    p.mode = ModeShape::standing_wave(1.0, 0.5);
    const AdiabaticFrame frame = AdiabaticFrame::build(p, grid);
    const SpinorField f = make_gaussian_state(grid, 1.0, 2.0, 2.0, Basis::Bare, 0.6, Complex(0, 0.8));
    const SpinorField back = to_bare(to_adiabatic(f, frame), frame);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.data().size(); ++i) worst = std::max(worst, std::abs(back.data()[i] - f.data()[i]));
    CHECK(worst <= 1e-15);
    CHECK_THROWS_AS(to_bare(f, frame), InvalidArgument);
    CHECK_THROWS_AS(to_adiabatic(to_adiabatic(f, frame), frame), InvalidArgument);
    auto other = make_grid(256, -20.0, 21.0);
    CHECK_THROWS_AS(to_adiabatic(make_gaussian_bare_state(other, 0.0, 0.0, 1.0), frame), InvalidArgument);
  }
}

TEST_CASE("frame observables") {
  auto grid = make_grid(1024, -50.0, 50.0);
  ModelParams p;
  p.detuning = 2.0;
  const AdiabaticFrame frame = AdiabaticFrame::build(p, grid);
  const SpinorField f = to_adiabatic(make_gaussian_bare_state(grid, 0.0, 1.0, 3.0), frame);
  const double up = expectation(f, Channel::Upper, Observable::UpperSurface, &frame).real();
  const double lo = expectation(f, Channel::Upper, Observable::LowerSurface, &frame).real();
  CHECK(up - lo == Approx(2.0));
  CHECK(expectation(f, Channel::Upper, Observable::ThetaSlopeMomentum, &frame) == Complex(0.0, 0.0));
  CHECK_THROWS_AS(expectation(f, Channel::Upper, Observable::Coupling), InvalidArgument);
  CHECK_THROWS_AS(expectation(f, Channel::Lower, Observable::Position), InvalidArgument);
}

TEST_CASE("theta slope momentum against a direct evaluation") {
  auto grid = make_grid(2048, -60.0, 60.0);
  ModelParams p;
  p.detuning = 0.5;
  p.mode = ModeShape::standing_wave(1.0, 0.2);
  const AdiabaticFrame frame = AdiabaticFrame::build(p, grid);
  const double x0 = 3.0, k0 = 1.5, w = 4.0;
  const SpinorField f = make_gaussian_state(grid, x0, k0, w, Basis::Adiabatic, 1.0, 0.0);
  // For a Gaussian, p psi = (k0 + i (x - x0) / w^2) psi.
  Complex direct = 0.0;
  const auto xs = grid->positions();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Complex psi = f.upper()[i];
    direct += std::conj(psi) * frame.dtheta[i] * Complex(k0, (xs[i] - x0) / (w * w)) * psi * grid->dx();
  }
  const Complex got = expectation(f, Channel::Upper, Observable::ThetaSlopeMomentum, &frame);
  CHECK(std::abs(got - direct) <= 1e-10);
  const double curv = expectation(f, Channel::Upper, Observable::ThetaCurvature, &frame).real();
  double dcurv = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) dcurv += std::norm(f.upper()[i]) * frame.d2theta[i] * grid->dx();
  CHECK(curv == Approx(dcurv).epsilon(1e-12));
}

TEST_CASE("tabulated frame matches the analytic frame") {
  auto grid = make_grid(1024, -10 * std::numbers::pi, 10 * std::numbers::pi);
  ModelParams analytic;
  analytic.detuning = 0.7;
  analytic.mode = ModeShape::standing_wave(1.0, 0.5);
  std::vector<double> samples;
  for (double x : grid->positions()) samples.push_back(std::sin(0.5 * x));
  ModelParams tab = analytic;
  tab.mode = ModeShape(TabulatedMode(grid->x_min(), grid->dx(), samples));
  const AdiabaticFrame a = AdiabaticFrame::build(analytic, grid);
  const AdiabaticFrame b = AdiabaticFrame::build(tab, grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    CHECK(b.theta[i] == Approx(a.theta[i]).epsilon(1e-12));
    CHECK(b.dtheta[i] == Approx(a.dtheta[i]).epsilon(1e-9));
    CHECK(b.d2theta[i] == Approx(a.d2theta[i]).epsilon(1e-8));
  }
}

TEST_CASE("snapshot csv") {
  auto grid = make_grid(4, 0.0, 4.0);
  SpinorField f(grid, Basis::Bare);
  f.upper()[1] = Complex(0.5, -0.25);
  std::ostringstream out;
  write_snapshot_csv(out, f);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,re_a,im_a,re_b,im_b");
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "1.0000000000000000e+00,5.0000000000000000e-01,-2.5000000000000000e-01,"
                "0.0000000000000000e+00,0.0000000000000000e+00");
}
