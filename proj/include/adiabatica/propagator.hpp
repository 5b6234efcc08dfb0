#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "adiabatica/grid.hpp"
#include "adiabatica/kernels.hpp"
#include "adiabatica/model.hpp"

namespace adiabatica {

/// Strang splitting of p^2/2m + V(x) for a bare-basis spinor:
/// half kinetic step, exact 2x2 potential exponential, half kinetic step.
///
/// The potential factor exp(-i V dt) is evaluated in closed form from the Pauli
/// decomposition V = mean + (Delta/2) sigma_z + G sigma_x, so it is unitary by construction.
/// A negative dt runs the evolution backwards.
class ExactPropagator {
 public:
  ExactPropagator(const ModelParams& params, GridPtr grid, double dt,
                  ExecutionPolicy policy = ExecutionPolicy::Serial);

  double dt() const noexcept { return dt_; }

  /// One Strang step.
  void step(SpinorField& field) const;
  /// `steps` Strang steps with adjacent half kinetic steps fused.
  void advance(SpinorField& field, std::size_t steps) const;

 private:
  void kinetic(SpinorField& field, const ComplexVector& factor) const;
  void potential(SpinorField& field) const;

  GridPtr grid_;
  double dt_;
  ExecutionPolicy policy_;
  ComplexVector half_kinetic_;  // length 2N, includes the 1/N of the inverse DFT
  ComplexVector full_kinetic_;
  ComplexVector m11_, m12_, m22_;
};

/// Split-operator evolution under H_ad = p^2/2m + diag(Delta_+, Delta_-): each adiabatic
/// channel moves on its own surface and no inter-channel coupling is ever applied.
class AdiabaticPropagator {
 public:
  AdiabaticPropagator(const AdiabaticFrame& frame, const ModelParams& params, double dt,
                      ExecutionPolicy policy = ExecutionPolicy::Serial);

  double dt() const noexcept { return dt_; }

  void step(SpinorField& field) const;
  void advance(SpinorField& field, std::size_t steps) const;

 private:
  void kinetic(SpinorField& field, const ComplexVector& factor) const;

  GridPtr grid_;
  double dt_;
  ExecutionPolicy policy_;
  ComplexVector half_kinetic_;
  ComplexVector full_kinetic_;
  ComplexVector potential_phase_;  // upper block exp(-i Delta_+ dt), lower block exp(-i Delta_- dt)
};

/// One exact Strang step of a bare-basis field (builds a propagator; use ExactPropagator in loops).
void split_step_full(SpinorField& field, const ModelParams& params, double dt);

/// One adiabatic step of an adiabatic-basis field.
void propagate_adiabatic(SpinorField& field, const AdiabaticFrame& frame, const ModelParams& params,
                         double dt);

/// dt <= 0.1 min(1 / max|Delta_pm|, m dx / p_max) with p_max = |p0| + 6/width.
double default_time_step(const ModelParams& params, const Grid& grid, double p0, double width);

/// dx <= min(1 / (4 (|p0| + 4/width)), lambda/16 for standing waves).
double default_grid_spacing(const ModelParams& params, double p0, double width);

/// Smallest power of two N with (x_max - x_min)/N <= spacing.
std::size_t points_for_spacing(double x_min, double x_max, double spacing);

struct InitialState {
  double x0 = 0.0;
  double p0 = 0.0;
  double width = 1.0;
  /// Internal amplitudes and the basis they refer to; the default is the bare upper level.
  Basis basis = Basis::Bare;
  Complex upper = 1.0;
  Complex lower = 0.0;
};

struct Scenario {
  ModelParams params;
  GridPtr grid;
  InitialState state;
  double dt = 0.0;
  /// Stop at t_final, or once the exact <x> reaches x_stop, whichever comes first.
  std::optional<double> t_final;
  std::optional<double> x_stop;
  /// Observables are computed every `stride` steps.
  std::size_t stride = 1;
  bool compute_adiabaticity = true;
  ExecutionPolicy policy = ExecutionPolicy::Serial;
};

struct TrajectorySample {
  double t = 0.0;
  double norm = 0.0;             ///< exact state
  double reference_norm = 0.0;   ///< adiabatic reference state
  double x_mean = 0.0;           ///< exact total density
  double p_mean = 0.0;
  double width = 0.0;            ///< sqrt(2 Var x), equals the Gaussian width parameter
  std::array<double, 2> populations{};     ///< exact state in the adiabatic channels (up, down)
  std::array<double, 2> channel_x{};       ///< exact state per adiabatic channel (NaN if empty)
  std::array<double, 2> channel_p{};
  std::array<double, 2> reference_x{};     ///< adiabatic reference packets (NaN if empty)
  std::array<double, 2> reference_p{};
  Complex fidelity{};
  double adiabaticity = 0.0;               ///< A_t including the d^2 theta term
  double adiabaticity_first_order = 0.0;   ///< A_t without it
  bool adiabaticity_degenerate = false;
};

struct Trajectory {
  /// Initial populations of the adiabatic channels (N_up^0, N_down^0).
  std::array<double, 2> initial_weights{};
  std::vector<TrajectorySample> samples;
};

/// Passed to the run observer at every sample.
struct SampleView {
  const TrajectorySample& sample;
  const SpinorField& exact;      ///< bare basis
  const SpinorField& reference;  ///< adiabatic basis
  const AdiabaticFrame& frame;
};

/// Evolves the exact state and the adiabatic reference U(x) Phi(x, 0) side by side.
/// Throws DomainGuardError when a packet comes within 5 widths of the box edge and
/// InvalidArgument when the grid cannot resolve the packet momentum.
Trajectory run(const Scenario& scenario,
               const std::function<void(const SampleView&)>& observer = {});

/// CSV: t, x_mean, p_mean, norm, pop_up, pop_down, x_up, p_up, x_down, p_down.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace adiabatica
