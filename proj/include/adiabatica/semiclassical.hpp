#pragma once

// Effective time-dependent two-level models H(t) = [[delta/2, G(t)], [G(t), -delta/2]]:
// reduction by the classical substitution x -> p0 t / m + x0, their adiabaticity
// parameter, the inverse construction of G(t) from a target parameter, and the classical
// channel trajectories that feed the generalized construction.

#include <array>
#include <cstddef>
#include <functional>
#include <ostream>
#include <vector>

#include "adiabatica/fft.hpp"
#include "adiabatica/metrics.hpp"
#include "adiabatica/model.hpp"

namespace adiabatica {

enum class CouplingProvenance { Substitution, InverseConstructed };

struct EffectiveModel {
  double detuning = 0.0;  ///< delta, held constant
  std::function<double(double)> coupling;       ///< G(t)
  std::function<double(double)> coupling_rate;  ///< dG/dt
  CouplingProvenance provenance = CouplingProvenance::Substitution;
};

/// delta = Delta, G(t) = sqrt(n) g(p0 t / m + x0). Valid when p stays close to p0.
EffectiveModel reduce_by_substitution(const ModelParams& params, double p0, double x0);

/// delta G' / (delta^2 + 4 G^2)^(3/2), signed. Degenerate when delta = G = 0.
PointValue adiabaticity_rate(const EffectiveModel& model, double t);

/// |delta G' / (delta^2 + 4 G^2)^(3/2)|.
PointValue time_adiabaticity(const EffectiveModel& model, double t);

struct TwoLevelSample {
  double t = 0.0;
  Complex upper{};
  Complex lower{};
};

/// Integrates i d/dt c = H(t) c from t0 to t_final. Each step applies the exact exponential
/// of H frozen at the step midpoint (second order, unitary). Throws StepSizeError when
/// dt sqrt(delta^2/4 + G^2) exceeds 0.5 at any midpoint.
std::vector<TwoLevelSample> solve_two_level(const EffectiveModel& model,
                                            std::array<Complex, 2> initial, double t0,
                                            double t_final, double dt, std::size_t stride = 1);

/// A uniformly sampled function of time.
struct TimeSeries {
  std::vector<double> t;
  std::vector<double> value;
};

/// Samples the signed adiabaticity rate of a model on [t0, t1] with `points` samples.
TimeSeries sample_adiabaticity_rate(const EffectiveModel& model, double t0, double t1,
                                    std::size_t points);

struct InverseCoupling {
  double detuning = 0.0;
  std::vector<double> t;
  std::vector<double> integral;  ///< f(t) = f(t0) + integral of the target
  std::vector<double> coupling;  ///< G(t)
  std::vector<double> rate;      ///< dG/dt implied by the target

  /// Piecewise-linear model through the constructed samples.
  EffectiveModel model() const;
};

/// Solves delta G' / (delta^2 + 4G^2)^(3/2) = target(t) with G(t0) = initial_coupling.
/// Separating variables gives G / sqrt(delta^2 + 4G^2) = delta f(t), hence
/// G = delta |delta| f / sqrt(1 - 4 delta^2 f^2). The target is the signed rate; for the
/// customary nonnegative A_t the coupling grows monotonically.
/// Throws InversionDomainError (with the critical time) once 2 |delta f| reaches 1.
InverseCoupling inverse_coupling(const TimeSeries& target, double delta,
                                 double initial_coupling = 0.0);

/// The shortcut G = f / sqrt(delta^2 + 4 f), kept
/// for comparison only: it does not satisfy the defining equation. NaN where undefined.
std::vector<double> naive_inverse_coupling(const TimeSeries& target, double delta);

/// max_t |delta G'/(delta^2 + 4G^2)^(3/2) - target| with G' taken by fourth-order finite
/// differences of the tabulated coupling.
double back_substitution_residual(const InverseCoupling& inverse, const TimeSeries& target);

/// Cumulative integral of uniformly spaced samples (fourth order in the interior).
std::vector<double> cumulative_integral(const std::vector<double>& t, const std::vector<double>& y);

struct ClassicalState {
  double x = 0.0;
  double p = 0.0;
};

struct ClassicalSample {
  double t = 0.0;
  double x = 0.0;
  double p = 0.0;
  double energy = 0.0;
};

/// One trajectory per adiabatic channel (index 0: up on Delta_+, 1: down on Delta_-),
/// each obeying dx/dt = p/m, dp/dt = -d Delta_channel / dx, integrated by velocity Verlet.
/// Throws StepSizeError where dt^2 |d^2 Delta / dx^2| / m exceeds 0.25.
using ClassicalTrajectories = std::array<std::vector<ClassicalSample>, 2>;
ClassicalTrajectories classical_trajectories(const ModelParams& params,
                                             std::array<ClassicalState, 2> initial, double t_final,
                                             double dt, std::size_t stride = 1);

/// (1/2m) sum_i N_i |2 theta'(x_i) p_i| / (Delta_+ - Delta_-)(x_i) along classical trajectories.
TimeSeries trajectory_adiabaticity(const ModelParams& params, const ClassicalTrajectories& paths,
                                   ChannelWeights weights);

/// CSV: t, G. The detuning is written in the preceding comment line by the caller.
void write_effective_model_csv(std::ostream& out, const std::vector<double>& t,
                               const std::vector<double>& coupling);

/// CSV: t, x_up, p_up, energy_up, x_down, p_down, energy_down.
void write_classical_csv(std::ostream& out, const ClassicalTrajectories& paths);

}  // namespace adiabatica
