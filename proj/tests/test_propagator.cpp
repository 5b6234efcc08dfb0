#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "adiabatica/error.hpp"
#include "adiabatica/propagator.hpp"

using namespace adiabatica;
using doctest::Approx;

namespace {

// Coupling that is constant to 1e-10 over the box.
ModelParams uniform_coupling(double detuning, double g) {
  ModelParams p;
  p.detuning = detuning;
  const double a = 1e6;
  p.mode = ModeShape::gaussian(g * std::sqrt(2.0 * std::numbers::pi) * a, a);
  return p;
}

double max_diff(const SpinorField& a, const SpinorField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

}  // namespace

TEST_CASE("free packet moves and spreads") {
  auto grid = make_grid(4096, -200.0, 200.0);
  ModelParams p;
  p.detuning = 1.0;
  SpinorField f = make_gaussian_bare_state(grid, -50.0, 2.0, 3.0);
  const ExactPropagator prop(p, grid, 0.01);
  prop.advance(f, 2000);
  const double t = 20.0;
  const DensityMoments m = total_position_moments(f);
  CHECK(m.mean == Approx(-50.0 + 2.0 * t).epsilon(1e-9));
  const double w = 3.0 * std::sqrt(1.0 + std::pow(t / 9.0, 2));
  CHECK(std::sqrt(2.0 * m.variance) == Approx(w).epsilon(1e-9));
}

TEST_CASE("uniform coupling reproduces the Rabi formula") {
  auto grid = make_grid(512, -40.0, 40.0);
  const double delta = 0.6, g = 0.4;
  const ModelParams p = uniform_coupling(delta, g);
  SpinorField f = make_gaussian_bare_state(grid, 0.0, 0.0, 4.0);
  const double dt = 0.01;
  const ExactPropagator prop(p, grid, dt);
  const double omega = std::sqrt(delta * delta / 4 + g * g);
  for (int k = 1; k <= 10; ++k) {
    prop.advance(f, 100);
    const double t = k * 100 * dt;
    const double expected = 4 * g * g / (delta * delta + 4 * g * g) * std::pow(std::sin(omega * t), 2);
    CHECK(std::abs(f.population(Channel::Lower) - expected) <= 1e-3);
  }
}

TEST_CASE("exact propagator is unitary and time reversible") {
  auto grid = make_grid(1024, -60.0, 60.0);
  ModelParams p;
  p.detuning = 0.5;
  p.mode = ModeShape::standing_wave(1.0, 0.4);
  const SpinorField start = make_gaussian_bare_state(grid, -10.0, 3.0, 4.0);
  SpinorField f = start;
  ExactPropagator(p, grid, 0.02).advance(f, 500);
  CHECK(std::abs(f.norm() - 1.0) <= 1e-12);
  ExactPropagator(p, grid, -0.02).advance(f, 500);
  CHECK(max_diff(f, start) <= 1e-10);
}

TEST_CASE("adiabatic propagator is unitary and time reversible") {
  auto grid = make_grid(1024, -60.0, 60.0);
  ModelParams p;
  p.detuning = 0.5;
  p.mode = ModeShape::gaussian(3.0, 5.0);
  const AdiabaticFrame frame = AdiabaticFrame::build(p, grid);
  const SpinorField start = to_adiabatic(make_gaussian_state(grid, -10.0, 3.0, 4.0, Basis::Bare, 0.6, 0.8), frame);
  SpinorField f = start;
  AdiabaticPropagator(frame, p, 0.02).advance(f, 500);
  CHECK(std::abs(f.norm() - 1.0) <= 1e-12);
  CHECK(f.population(Channel::Upper) == Approx(start.population(Channel::Upper)).epsilon(1e-12));
  AdiabaticPropagator(frame, p, -0.02).advance(f, 500);
  CHECK(max_diff(f, start) <= 1e-10);
}

TEST_CASE("single steps agree with the fused advance") {
  auto grid = make_grid(512, -40.0, 40.0);
  ModelParams p;
  p.detuning = 1.0;
  p.mode = ModeShape::gaussian(2.0, 3.0);
  SpinorField a = make_gaussian_bare_state(grid, -5.0, 1.0, 3.0);
  SpinorField b = a;
  for (int i = 0; i < 50; ++i) split_step_full(a, p, 0.05);
  ExactPropagator(p, grid, 0.05).advance(b, 50);
  CHECK(max_diff(a, b) <= 1e-12);
}

TEST_CASE("exact and adiabatic propagation agree when theta is constant") {
  auto grid = make_grid(512, -40.0, 40.0);
  const ModelParams p = uniform_coupling(0.8, 0.3);
  const AdiabaticFrame frame = AdiabaticFrame::build(p, grid);
  const SpinorField bare = make_gaussian_state(grid, -5.0, 1.0, 3.0, Basis::Bare, 0.6, Complex(0.0, 0.8));
  SpinorField exact = bare;
  SpinorField adiabatic = to_adiabatic(bare, frame);
  for (int i = 0; i < 200; ++i) {
    split_step_full(exact, p, 0.05);
    propagate_adiabatic(adiabatic, frame, p, 0.05);
  }
  CHECK(max_diff(to_adiabatic(exact, frame), adiabatic) <= 1e-8);
}

TEST_CASE("serial and parallel propagators agree") {
  auto grid = make_grid(2048, -80.0, 80.0);
  ModelParams p;
  p.detuning = 0.3;
  p.mode = ModeShape::standing_wave(1.0, 0.3);
  SpinorField a = make_gaussian_bare_state(grid, 0.0, 2.0, 5.0);
  SpinorField b = a;
  ExactPropagator(p, grid, 0.02, ExecutionPolicy::Serial).advance(a, 100);
  ExactPropagator(p, grid, 0.02, ExecutionPolicy::Parallel).advance(b, 100);
  CHECK(max_diff(a, b) == 0.0);
}

TEST_CASE("default resolution rules") {
  ModelParams p;
  p.detuning = 2.0;
  p.mode = ModeShape::standing_wave(1.0, 0.5);
  const double dx = default_grid_spacing(p, 3.0, 2.0);
  CHECK(dx == Approx(std::min(1.0 / (4.0 * 5.0), 2 * std::numbers::pi / 0.5 / 16)));
  CHECK(points_for_spacing(0.0, 100.0, 0.1) == 1024);
  CHECK(points_for_spacing(0.0, 102.4, 0.1) == 1024);
  const Grid grid(1024, -50.0, 50.0);
  const double dt = default_time_step(p, grid, 3.0, 2.0);
  CHECK(dt <= 0.1 / std::max(std::abs(adiabatic_eigenvalues(p, 0.0).upper), 1.0) + 1e-15);
  CHECK(dt <= 0.1 * grid.dx() / 6.0 + 1e-15);
}

TEST_CASE("run without coupling keeps unit fidelity") {
  Scenario s;
  s.params.detuning = 1.0;
  s.grid = make_grid(2048, -150.0, 150.0);
  s.state = {-50.0, 2.0, 5.0};
  s.dt = 0.05;
  s.t_final = 40.0;
  s.stride = 20;
  const Trajectory tr = run(s);
  REQUIRE(tr.samples.size() == 41);
  CHECK(std::abs(tr.samples.front().fidelity - Complex(1.0, 0.0)) <= 1e-9);
  for (const auto& smp : tr.samples) {
    CHECK(std::abs(std::abs(smp.fidelity) - 1.0) <= 1e-9);
    CHECK(smp.adiabaticity == 0.0);
    CHECK(std::abs(smp.norm - 1.0) <= 1e-10);
  }
  CHECK(tr.samples.back().x_mean == Approx(30.0).epsilon(1e-9));
}

TEST_CASE("run stops at x_stop and guards the box") {
  Scenario s;
  s.params.detuning = 1.0;
  s.params.mode = ModeShape::gaussian(1.0, 5.0);
  s.grid = make_grid(1024, -100.0, 100.0);
  s.state = {-40.0, 2.0, 4.0};
  s.dt = 0.05;
  s.x_stop = 0.0;
  const Trajectory tr = run(s);
  CHECK(tr.samples.back().x_mean >= 0.0);
  CHECK(tr.samples[tr.samples.size() - 2].x_mean < 0.0);

  s.x_stop.reset();
  s.t_final = 200.0;
  CHECK_THROWS_AS(run(s), DomainGuardError);

  s.t_final = 1.0;
  s.state.p0 = 100.0;
  CHECK_THROWS_AS(run(s), InvalidArgument);
}

TEST_CASE("trajectory csv header") {
  Scenario s;
  s.params.detuning = 1.0;
  s.grid = make_grid(256, -30.0, 30.0);
  s.state = {0.0, 0.0, 2.0};
  s.dt = 0.1;
  s.t_final = 0.2;
  std::ostringstream out;
  write_trajectory_csv(out, run(s));
  CHECK(out.str().rfind("t,x_mean,p_mean,norm,pop_up,pop_down,x_up,p_up,x_down,p_down\n", 0) == 0);
}
