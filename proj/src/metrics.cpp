#include "adiabatica/metrics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adiabatica/error.hpp"
#include "adiabatica/propagator.hpp"

namespace adiabatica {

namespace {

constexpr double kDegenerate = 1e-24;
constexpr double kEmptyPacket = 1e-24;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

PointValue approx_A0(const ModelParams& params, double x, double p0) {
  const double d = params.splitting();
  const double g = params.coupling(x);
  const double denom = d * d + 4.0 * g * g;
  if (denom < kDegenerate) return {kInf, true};
  return {std::abs(p0 / params.mass * d * params.coupling_slope(x) / std::pow(denom, 1.5)), false};
}

PointValue approx_A0_with_curvature(const ModelParams& params, double x, double p0) {
  const double d = params.splitting();
  const double g = params.coupling(x);
  const double denom = d * d + 4.0 * g * g;
  if (denom < kDegenerate) return {kInf, true};
  const double slope = dtheta(params, x).value;
  const double curv = d2theta(params, x).value;
  return {std::abs(2.0 * p0 * slope + curv) / (2.0 * params.mass * std::sqrt(denom)), false};
}

AdiabaticityBreakdown exact_At(const SpinorField& reference, const AdiabaticFrame& frame,
                               const ModelParams& params, ChannelWeights weights,
                               bool include_d2theta, ExecutionPolicy policy) {
  if (reference.basis() != Basis::Adiabatic) {
    throw InvalidArgument("exact_At: reference packets must be in the adiabatic basis");
  }
  AdiabaticityBreakdown out;
  out.weights = weights;
  out.includes_curvature = include_d2theta;
  const double w[2] = {weights.upper, weights.lower};
  double* terms[2] = {&out.upper_term, &out.lower_term};
  for (Channel c : {Channel::Upper, Channel::Lower}) {
    const auto i = static_cast<std::size_t>(c);
    if (w[i] == 0.0 || reference.population(c, policy) < kEmptyPacket) continue;
    Complex num = 2.0 * expectation(reference, c, Observable::ThetaSlopeMomentum, &frame, policy);
    if (include_d2theta) num += expectation(reference, c, Observable::ThetaCurvature, &frame, policy);
    const double gap = std::abs(expectation(reference, c, Observable::UpperSurface, &frame, policy).real() -
                                expectation(reference, c, Observable::LowerSurface, &frame, policy).real());
    if (gap < 1e-12) {
      out.degenerate = true;
      *terms[i] = kInf;
      continue;
    }
    *terms[i] = std::abs(num) / (2.0 * params.mass * gap);
    out.value += w[i] * *terms[i];
  }
  if (out.degenerate) out.value = kInf;
  return out;
}

Complex fidelity(const SpinorField& exact, const SpinorField& reference, const AdiabaticFrame& frame,
                 ExecutionPolicy policy) {
  if (!exact.grid().same_as(reference.grid())) throw InvalidArgument("fidelity: grid mismatch");
  if (reference.basis() != Basis::Adiabatic) {
    throw InvalidArgument("fidelity: reference must be in the adiabatic basis");
  }
  const SpinorField* rotated = &exact;
  SpinorField tmp(exact.grid_ptr(), Basis::Adiabatic);
  if (exact.basis() == Basis::Bare) {
    tmp = to_adiabatic(exact, frame, policy);
    rotated = &tmp;
  }
  return kernels::inner(policy, reference.data(), rotated->data()) * exact.grid().dx();
}

AdiabaticityTrace adiabaticity_trace(const Trajectory& trajectory, bool include_d2theta) {
  AdiabaticityTrace tr;
  tr.weights = {trajectory.initial_weights[0], trajectory.initial_weights[1]};
  tr.includes_curvature = include_d2theta;
  for (const TrajectorySample& s : trajectory.samples) {
    tr.t.push_back(s.t);
    tr.x_mean.push_back(s.x_mean);
    tr.values.push_back(include_d2theta ? s.adiabaticity : s.adiabaticity_first_order);
  }
  return tr;
}

FidelityTrace fidelity_trace(const Trajectory& trajectory, Abscissa abscissa, double x0, double p0,
                             double mass) {
  FidelityTrace tr;
  for (const TrajectorySample& s : trajectory.samples) {
    tr.t.push_back(s.t);
    tr.overlap.push_back(s.fidelity);
    tr.magnitude.push_back(std::abs(s.fidelity));
    tr.abscissa.push_back(abscissa == Abscissa::Measured ? s.x_mean : p0 * s.t / mass + x0);
  }
  return tr;
}

std::vector<LocusPoint> A0_max_locus(const ModelParams& base, double p0,
                                     std::span<const double> detunings, double x_lo, double x_hi,
                                     std::size_t scan_points) {
  if (!(x_hi > x_lo) || scan_points < 3) throw InvalidArgument("A0_max_locus: bad search window");
  std::vector<LocusPoint> out;
  out.reserve(detunings.size());
  const double h = (x_hi - x_lo) / static_cast<double>(scan_points - 1);
  for (double d : detunings) {
    ModelParams p = base;
    p.detuning = d;
    auto value = [&](double x) {
      const PointValue v = approx_A0(p, x, p0);
      return v.degenerate ? 0.0 : v.value;
    };
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < scan_points; ++i) {
      const double v = value(x_lo + static_cast<double>(i) * h);
      if (v > best_value) {
        best_value = v;
        best = i;
      }
    }
    if (!(best_value > 0.0)) {
      throw InvalidArgument("A0_max_locus: A0 vanishes on the whole window (flat objective)");
    }
    const double lo = x_lo + static_cast<double>(best == 0 ? 0 : best - 1) * h;
    const double hi = x_lo + static_cast<double>(std::min(best + 1, scan_points - 1)) * h;
    const auto [x_star, neg] = boost::math::tools::brent_find_minima(
        [&](double x) { return -value(x); }, lo, hi, std::numeric_limits<double>::digits / 2);
    out.push_back({d, x_star, -neg});
  }
  return out;
}

double lorentzian_parameter(const ModelParams& params) {
  if (params.detuning == 0.0) throw InvalidArgument("lorentzian_parameter: detuning must be nonzero");
  const double sqrt_n = std::sqrt(double(params.photon_number));
  if (const auto* sw = std::get_if<StandingWaveMode>(&params.mode.variant())) {
    return 2.0 * sw->wavenumber * sqrt_n * sw->amplitude / params.detuning;
  }
  if (const auto* lin = std::get_if<LinearMode>(&params.mode.variant())) {
    return 2.0 * sqrt_n * lin->slope / params.detuning;
  }
  throw InvalidArgument("lorentzian_parameter: needs a linear or standing-wave mode");
}

double lorentzian_approximant(double x, double p0, double mass, double detuning, double c) {
  return p0 / (2.0 * mass * detuning) * std::abs(c) / std::pow(1.0 + c * c * x * x, 1.5);
}

LorentzianCheck lorentzian_integral_check(const ModelParams& params, double p0, double window) {
  if (!(window > 0.0)) throw InvalidArgument("lorentzian_integral_check: window must be positive");
  LorentzianCheck r;
  r.c = lorentzian_parameter(params);
  r.window = window;
  const double cw = std::abs(r.c) * window;
  r.tail_fraction = 1.0 - cw / std::sqrt(1.0 + cw * cw);
  if (r.tail_fraction > 0.01) {
    throw InvalidArgument("lorentzian_integral_check: window too small, tail fraction " +
                          std::to_string(r.tail_fraction) + " exceeds 1%");
  }
  const double m = params.mass;
  const double d = params.detuning;
  auto f = [&](double x) { return std::abs(lorentzian_approximant(x, p0, m, d, r.c)); };
  // Split at the peak so the adaptive rule sees a smooth integrand on each side.
  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  r.numeric = Rule::integrate(f, -window, 0.0, 20, 1e-13) + Rule::integrate(f, 0.0, window, 20, 1e-13);
  r.analytic = std::abs(p0 / (m * d));
  return r;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("log_log_slope: need two points");
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

LimitOrderReport limit_order_probe(const ModelParams& standing_wave, double p0, double fixed_detuning) {
  const auto* sw = std::get_if<StandingWaveMode>(&standing_wave.mode.variant());
  if (sw == nullptr) throw InvalidArgument("limit_order_probe: needs a standing-wave mode");
  const double q = sw->wavenumber;
  const double amp = std::abs(sw->amplitude);
  LimitOrderReport r;
  r.off_node_x = 0.3 / q;
  r.fixed_detuning = fixed_detuning;

  ModelParams p = standing_wave;
  auto a0 = [&](double d, double x) {
    p.detuning = d;
    return approx_A0(p, x, p0).value;
  };

  for (int k = 2; k <= 6; ++k) {
    const double d = amp * std::pow(10.0, -k);
    r.off_node_detunings.push_back(d);
    r.off_node_values.push_back(a0(d, r.off_node_x));
    r.on_node_values.push_back(a0(d, 0.0));
  }
  r.off_node_exponent = log_log_slope(r.off_node_detunings, r.off_node_values);
  r.on_node_exponent = log_log_slope(r.off_node_detunings, r.on_node_values);

  for (int j = 0; j <= 8; ++j) r.node_offsets.push_back(std::pow(10.0, -j) / q);
  r.node_offsets.push_back(0.0);
  for (double off : r.node_offsets) r.node_path_values.push_back(a0(fixed_detuning, off));
  r.node_path_max = *std::max_element(r.node_path_values.begin(), r.node_path_values.end());
  r.ordering_ratio = r.node_path_max / a0(fixed_detuning, r.off_node_x);
  return r;
}

}  // namespace adiabatica
