#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "adiabatica/grid.hpp"
#include "adiabatica/model.hpp"

namespace adiabatica {

struct Trajectory;

/// Semiclassical adiabaticity parameter |(p0/m) Delta G' / (Delta^2 + 4G^2)^(3/2)|.
/// Returns a degenerate +infinity where Delta^2 + 4G^2 < 1e-24.
PointValue approx_A0(const ModelParams& params, double x, double p0);

/// (1/2m) |2 p0 theta' + theta''| / sqrt(Delta^2 + 4G^2): A0 with the curvature term kept.
PointValue approx_A0_with_curvature(const ModelParams& params, double x, double p0);

struct ChannelWeights {
  double upper = 1.0;  ///< N_up^0
  double lower = 0.0;  ///< N_down^0
};

struct AdiabaticityBreakdown {
  double value = 0.0;
  double upper_term = 0.0;  ///< unweighted channel ratio for the up packet
  double lower_term = 0.0;
  ChannelWeights weights;
  bool includes_curvature = true;
  /// A channel's surface gap averaged to below 1e-12; value is +infinity.
  bool degenerate = false;
};

/// Packet-averaged adiabaticity parameter
///   (1/2m) sum_i N_i |<2 theta' p>_i + <theta''>_i| / |<Delta_+>_i - <Delta_->_i|
/// with every average taken on the weight-normalized adiabatic reference packet i.
/// Channels with zero weight or an empty packet are skipped.
AdiabaticityBreakdown exact_At(const SpinorField& reference, const AdiabaticFrame& frame,
                               const ModelParams& params, ChannelWeights weights,
                               bool include_d2theta,
                               ExecutionPolicy policy = ExecutionPolicy::Serial);

/// F = integral Psi_ad^* (U Phi) dx summed over both channels. `exact` may be in either basis;
/// `reference` must be adiabatic. Throws InvalidArgument on a grid mismatch.
Complex fidelity(const SpinorField& exact, const SpinorField& reference, const AdiabaticFrame& frame,
                 ExecutionPolicy policy = ExecutionPolicy::Serial);

struct AdiabaticityTrace {
  std::vector<double> t;
  std::vector<double> values;
  std::vector<double> x_mean;
  ChannelWeights weights;
  bool includes_curvature = true;
};

enum class Abscissa {
  Measured,  ///< exact-run <x>
  Nominal,   ///< p0 t / m + x0
};

struct FidelityTrace {
  std::vector<double> t;
  std::vector<Complex> overlap;
  std::vector<double> magnitude;
  std::vector<double> abscissa;
};

AdiabaticityTrace adiabaticity_trace(const Trajectory& trajectory, bool include_d2theta);
FidelityTrace fidelity_trace(const Trajectory& trajectory, Abscissa abscissa, double x0 = 0.0,
                             double p0 = 0.0, double mass = 1.0);

struct LocusPoint {
  double detuning = 0.0;
  double x_max = 0.0;
  double value = 0.0;  ///< A0 at x_max
};

/// For each detuning, the argmax of A0 over [x_lo, x_hi] (x_lo >= 0 for the positive-x
/// maximum): a grid scan followed by Brent refinement around the best cell.
/// Throws InvalidArgument for a flat (identically zero) objective.
std::vector<LocusPoint> A0_max_locus(const ModelParams& base, double p0,
                                     std::span<const double> detunings, double x_lo, double x_hi,
                                     std::size_t scan_points = 4001);

/// C of the local Lorentzian form: 2 sqrt(n) g'(node) / Delta, i.e. 2 q sqrt(n) A / Delta for a
/// standing wave and 2 sqrt(n) C_lin / Delta for a linear coupling.
double lorentzian_parameter(const ModelParams& params);

/// (p0 / 2 m Delta) |C| / (1 + C^2 x^2)^(3/2)
double lorentzian_approximant(double x, double p0, double mass, double detuning, double c);

struct LorentzianCheck {
  double numeric = 0.0;
  double analytic = 0.0;  ///< |p0 / (m Delta)|
  double c = 0.0;
  double window = 0.0;
  double tail_fraction = 0.0;  ///< share of the integral outside [-window, window]
};

/// Adaptive quadrature of the approximant over [-window, window]. Throws InvalidArgument if
/// Delta == 0, the mode is not linear/standing-wave, or the neglected tail exceeds 1 %.
LorentzianCheck lorentzian_integral_check(const ModelParams& params, double p0, double window);

struct LimitOrderReport {
  // Path (i): x fixed off-node, Delta -> 0.
  double off_node_x = 0.0;
  std::vector<double> off_node_detunings;
  std::vector<double> off_node_values;
  double off_node_exponent = 0.0;  ///< fitted d log A0 / d log Delta, expected 1

  // Path (ii): Delta fixed, x -> node.
  double fixed_detuning = 0.0;
  std::vector<double> node_offsets;
  std::vector<double> node_path_values;
  double node_path_max = 0.0;

  // On-node scaling A0(node) versus Delta, expected exponent -2.
  std::vector<double> on_node_values;
  double on_node_exponent = 0.0;

  /// node_path_max / A0(off_node_x) at fixed_detuning.
  double ordering_ratio = 0.0;
};

/// Evaluates A0 for a standing wave along both iterated-limit paths around the node x = 0.
LimitOrderReport limit_order_probe(const ModelParams& standing_wave, double p0,
                                   double fixed_detuning = 1e-3);

/// Least-squares slope of log y against log x.
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace adiabatica
