#include "adiabatica/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "adiabatica/csv.hpp"
#include "adiabatica/error.hpp"
#include "adiabatica/metrics.hpp"

namespace adiabatica {

namespace {

// exp(-i k^2 tau / 2m) / N duplicated over both components.
ComplexVector kinetic_factor(const Grid& grid, double mass, double tau) {
  const std::size_t n = grid.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto ks = grid.momenta();
  ComplexVector f(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    f[j] = std::polar(inv_n, -ks[j] * ks[j] * tau / (2.0 * mass));
    f[j + n] = f[j];
  }
  return f;
}

}  // namespace

ExactPropagator::ExactPropagator(const ModelParams& params, GridPtr grid, double dt,
                                 ExecutionPolicy policy)
    : grid_(std::move(grid)), dt_(dt), policy_(policy) {
  params.validate();
  if (dt == 0.0 || !std::isfinite(dt)) throw InvalidArgument("ExactPropagator: dt must be nonzero");
  half_kinetic_ = kinetic_factor(*grid_, params.mass, 0.5 * dt);
  full_kinetic_ = kinetic_factor(*grid_, params.mass, dt);
  const std::size_t n = grid_->size();
  m11_.resize(n);
  m12_.resize(n);
  m22_.resize(n);
  const double half = 0.5 * params.splitting();
  const Complex global = std::polar(1.0, -params.mean_energy() * dt);
  const auto xs = grid_->positions();
  for (std::size_t i = 0; i < n; ++i) {
    // exp(-i (h_z sigma_z + h_x sigma_x) dt) = cos(r dt) - i sin(r dt)/r (h_z sigma_z + h_x sigma_x)
    const double g = params.coupling(xs[i]);
    const double r = std::hypot(half, g);
    const double c = std::cos(r * dt);
    const double sinc = r > 0.0 ? std::sin(r * dt) / r : dt;
    m11_[i] = global * Complex(c, -sinc * half);
    m22_[i] = global * Complex(c, sinc * half);
    m12_[i] = global * Complex(0.0, -sinc * g);
  }
}

void ExactPropagator::kinetic(SpinorField& field, const ComplexVector& factor) const {
  const FourierTransform& fft = grid_->pair_transform();
  fft.forward(field.data());
  kernels::multiply(policy_, field.data(), factor);
  fft.backward(field.data());
}

void ExactPropagator::potential(SpinorField& field) const {
  kernels::apply_symmetric(policy_, field.upper(), field.lower(), m11_, m12_, m22_);
}

void ExactPropagator::step(SpinorField& field) const { advance(field, 1); }

void ExactPropagator::advance(SpinorField& field, std::size_t steps) const {
  if (field.basis() != Basis::Bare) throw InvalidArgument("ExactPropagator: field must be in the bare basis");
  if (!field.grid().same_as(*grid_)) throw InvalidArgument("ExactPropagator: grid mismatch");
  if (steps == 0) return;
  kinetic(field, half_kinetic_);
  for (std::size_t s = 0; s + 1 < steps; ++s) {
    potential(field);
    kinetic(field, full_kinetic_);
  }
  potential(field);
  kinetic(field, half_kinetic_);
}

AdiabaticPropagator::AdiabaticPropagator(const AdiabaticFrame& frame, const ModelParams& params,
                                         double dt, ExecutionPolicy policy)
    : grid_(frame.grid), dt_(dt), policy_(policy) {
  params.validate();
  if (!grid_) throw InvalidArgument("AdiabaticPropagator: frame has no grid");
  if (dt == 0.0 || !std::isfinite(dt)) throw InvalidArgument("AdiabaticPropagator: dt must be nonzero");
  half_kinetic_ = kinetic_factor(*grid_, params.mass, 0.5 * dt);
  full_kinetic_ = kinetic_factor(*grid_, params.mass, dt);
  const std::size_t n = grid_->size();
  potential_phase_.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    potential_phase_[i] = std::polar(1.0, -frame.upper[i] * dt);
    potential_phase_[i + n] = std::polar(1.0, -frame.lower[i] * dt);
  }
}

void AdiabaticPropagator::kinetic(SpinorField& field, const ComplexVector& factor) const {
  const FourierTransform& fft = grid_->pair_transform();
  fft.forward(field.data());
  kernels::multiply(policy_, field.data(), factor);
  fft.backward(field.data());
}

void AdiabaticPropagator::step(SpinorField& field) const { advance(field, 1); }

void AdiabaticPropagator::advance(SpinorField& field, std::size_t steps) const {
  if (field.basis() != Basis::Adiabatic) {
    throw InvalidArgument("AdiabaticPropagator: field must be in the adiabatic basis");
  }
  if (!field.grid().same_as(*grid_)) throw InvalidArgument("AdiabaticPropagator: grid mismatch");
  if (steps == 0) return;
  kinetic(field, half_kinetic_);
  for (std::size_t s = 0; s + 1 < steps; ++s) {
    kernels::multiply(policy_, field.data(), potential_phase_);
    kinetic(field, full_kinetic_);
  }
  kernels::multiply(policy_, field.data(), potential_phase_);
  kinetic(field, half_kinetic_);
}

void split_step_full(SpinorField& field, const ModelParams& params, double dt) {
  ExactPropagator(params, field.grid_ptr(), dt).step(field);
}

void propagate_adiabatic(SpinorField& field, const AdiabaticFrame& frame, const ModelParams& params,
                         double dt) {
  AdiabaticPropagator(frame, params, dt).step(field);
}

double default_time_step(const ModelParams& params, const Grid& grid, double p0, double width) {
  double max_level = 0.0;
  for (double x : grid.positions()) {
    const AdiabaticLevels lv = adiabatic_eigenvalues(params, x);
    max_level = std::max({max_level, std::abs(lv.upper), std::abs(lv.lower)});
  }
  const double p_max = std::abs(p0) + 6.0 / width;
  double limit = params.mass * grid.dx() / p_max;
  if (max_level > 0.0) limit = std::min(limit, 1.0 / max_level);
  return 0.1 * limit;
}

double default_grid_spacing(const ModelParams& params, double p0, double width) {
  double dx = 1.0 / (4.0 * (std::abs(p0) + 4.0 / width));
  if (const auto* sw = std::get_if<StandingWaveMode>(&params.mode.variant())) {
    dx = std::min(dx, 2.0 * std::numbers::pi / sw->wavenumber / 16.0);
  }
  return dx;
}

std::size_t points_for_spacing(double x_min, double x_max, double spacing) {
  std::size_t n = 4;
  while ((x_max - x_min) / static_cast<double>(n) > spacing) n *= 2;
  return n;
}

namespace {

constexpr double kEmpty = 1e-24;

double momentum_mean(const SpinorField& field) {
  const Grid& grid = field.grid();
  ComplexVector buf(field.data().begin(), field.data().end());
  grid.pair_transform().forward(buf);
  const std::size_t n = grid.size();
  const auto ks = grid.momenta();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < 2 * n; ++j) {
    const double d = std::norm(buf[j]);
    num += ks[j % n] * d;
    den += d;
  }
  return num / den;
}

void guard_packet(const Grid& grid, double mean, double width, double t, const char* which) {
  const double margin = 5.0 * width;
  if (mean - margin < grid.x_min() || mean + margin > grid.x_max()) {
    throw DomainGuardError(std::string("run: ") + which + " packet at <x> = " + csv::number(mean) +
                           " (width " + csv::number(width) + ") within 5 widths of the box edge at t = " +
                           csv::number(t));
  }
}

}  // namespace

Trajectory run(const Scenario& sc, const std::function<void(const SampleView&)>& observer) {
  sc.params.validate();
  if (!sc.grid) throw InvalidArgument("run: scenario has no grid");
  if (!(sc.dt > 0.0)) throw InvalidArgument("run: dt must be positive");
  if (sc.stride == 0) throw InvalidArgument("run: stride must be positive");
  if (!sc.t_final && !sc.x_stop) throw InvalidArgument("run: need t_final or x_stop");
  const Grid& grid = *sc.grid;
  const InitialState& st = sc.state;
  if (grid.nyquist() <= std::abs(st.p0) + 6.0 / st.width) {
    throw InvalidArgument("run: grid Nyquist momentum " + csv::number(grid.nyquist()) +
                          " does not exceed |p0| + 6/width = " +
                          csv::number(std::abs(st.p0) + 6.0 / st.width));
  }

  const AdiabaticFrame frame = AdiabaticFrame::build(sc.params, sc.grid);
  SpinorField exact =
      make_gaussian_state(sc.grid, st.x0, st.p0, st.width, st.basis, st.upper, st.lower);
  if (exact.basis() == Basis::Adiabatic) exact = to_bare(exact, frame, sc.policy);
  SpinorField reference = to_adiabatic(exact, frame, sc.policy);

  Trajectory traj;
  traj.initial_weights = {reference.population(Channel::Upper, sc.policy),
                          reference.population(Channel::Lower, sc.policy)};
  {
    const double total = traj.initial_weights[0] + traj.initial_weights[1];
    traj.initial_weights[0] /= total;
    traj.initial_weights[1] /= total;
  }
  const ChannelWeights weights{traj.initial_weights[0], traj.initial_weights[1]};

  const ExactPropagator exact_prop(sc.params, sc.grid, sc.dt, sc.policy);
  const AdiabaticPropagator adiabatic_prop(frame, sc.params, sc.dt, sc.policy);
  const double t_end = sc.t_final.value_or(std::numeric_limits<double>::infinity());

  std::size_t step = 0;
  while (true) {
    const double t = static_cast<double>(step) * sc.dt;
    TrajectorySample s;
    s.t = t;
    s.norm = exact.norm(sc.policy);
    s.reference_norm = reference.norm(sc.policy);
    const DensityMoments mom = total_position_moments(exact, sc.policy);
    s.x_mean = mom.mean;
    s.width = std::sqrt(2.0 * mom.variance);
    s.p_mean = momentum_mean(exact);
    guard_packet(grid, s.x_mean, std::max(s.width, st.width), t, "exact");

    const SpinorField exact_ad = to_adiabatic(exact, frame, sc.policy);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (Channel c : {Channel::Upper, Channel::Lower}) {
      const auto i = static_cast<std::size_t>(c);
      s.populations[i] = exact_ad.population(c, sc.policy);
      s.channel_x[i] = s.channel_p[i] = s.reference_x[i] = s.reference_p[i] = nan;
      if (s.populations[i] > kEmpty) {
        s.channel_x[i] = expectation(exact_ad, c, Observable::Position, nullptr, sc.policy).real();
        s.channel_p[i] = expectation(exact_ad, c, Observable::Momentum, nullptr, sc.policy).real();
      }
      if (reference.population(c, sc.policy) > kEmpty) {
        s.reference_x[i] = expectation(reference, c, Observable::Position, nullptr, sc.policy).real();
        s.reference_p[i] = expectation(reference, c, Observable::Momentum, nullptr, sc.policy).real();
        const double w = std::sqrt(2.0 * position_variance(reference, c, sc.policy));
        guard_packet(grid, s.reference_x[i], std::max(w, st.width), t, "reference");
      }
    }
    s.fidelity = fidelity(exact_ad, reference, frame, sc.policy);
    if (sc.compute_adiabaticity) {
      const auto full = exact_At(reference, frame, sc.params, weights, true, sc.policy);
      const auto first = exact_At(reference, frame, sc.params, weights, false, sc.policy);
      s.adiabaticity = full.value;
      s.adiabaticity_first_order = first.value;
      s.adiabaticity_degenerate = full.degenerate || first.degenerate;
    }
    traj.samples.push_back(s);
    if (observer) observer(SampleView{traj.samples.back(), exact, reference, frame});

    if (sc.x_stop && s.x_mean >= *sc.x_stop) break;
    if (t >= t_end - 1e-12 * std::max(1.0, std::abs(t_end))) break;

    std::size_t n = sc.stride;
    if (sc.t_final) {
      const auto remaining = static_cast<std::size_t>(std::llround((t_end - t) / sc.dt));
      n = std::max<std::size_t>(1, std::min(n, remaining));
    }
    exact_prop.advance(exact, n);
    adiabatic_prop.advance(reference, n);
    step += n;
  }
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,x_mean,p_mean,norm,pop_up,pop_down,x_up,p_up,x_down,p_down\n";
  for (const TrajectorySample& s : trajectory.samples) {
    const double row[] = {s.t,         s.x_mean,       s.p_mean,       s.norm,
                          s.populations[0], s.populations[1], s.channel_x[0], s.channel_p[0],
                          s.channel_x[1], s.channel_p[1]};
    csv::write_numbers(out, row);
  }
}

}  // namespace adiabatica
