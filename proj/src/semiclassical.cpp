#include "adiabatica/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adiabatica/csv.hpp"
#include "adiabatica/error.hpp"

namespace adiabatica {

namespace {

constexpr double kDegenerate = 1e-24;

void check_uniform(const std::vector<double>& t) {
  if (t.size() < 5) throw InvalidArgument("time series: need at least five samples");
  const double h = t[1] - t[0];
  if (!(h > 0.0)) throw InvalidArgument("time series: times must increase");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw InvalidArgument("time series: samples must be uniformly spaced");
    }
  }
}

// Index i with t[i] <= tq < t[i+1], clamped.
std::size_t bracket(const std::vector<double>& t, double tq) {
  if (tq <= t.front()) return 0;
  if (tq >= t.back()) return t.size() - 2;
  const auto it = std::upper_bound(t.begin(), t.end(), tq);
  return static_cast<std::size_t>(it - t.begin()) - 1;
}

double lerp_at(const std::vector<double>& t, const std::vector<double>& y, double tq) {
  const std::size_t i = bracket(t, tq);
  const double s = std::clamp((tq - t[i]) / (t[i + 1] - t[i]), 0.0, 1.0);
  return y[i] + s * (y[i + 1] - y[i]);
}

}  // namespace

EffectiveModel reduce_by_substitution(const ModelParams& params, double p0, double x0) {
  params.validate();
  const double v = p0 / params.mass;
  EffectiveModel m;
  m.detuning = params.detuning;
  m.provenance = CouplingProvenance::Substitution;
  m.coupling = [params, v, x0](double t) { return params.coupling(v * t + x0); };
  m.coupling_rate = [params, v, x0](double t) { return v * params.coupling_slope(v * t + x0); };
  return m;
}

PointValue adiabaticity_rate(const EffectiveModel& model, double t) {
  const double d = model.detuning;
  const double g = model.coupling(t);
  const double denom = d * d + 4.0 * g * g;
  if (denom < kDegenerate) return {std::numeric_limits<double>::infinity(), true};
  return {d * model.coupling_rate(t) / std::pow(denom, 1.5), false};
}

PointValue time_adiabaticity(const EffectiveModel& model, double t) {
  PointValue v = adiabaticity_rate(model, t);
  v.value = std::abs(v.value);
  return v;
}

std::vector<TwoLevelSample> solve_two_level(const EffectiveModel& model,
                                            std::array<Complex, 2> initial, double t0,
                                            double t_final, double dt, std::size_t stride) {
  if (!(dt > 0.0) || !(t_final >= t0)) throw InvalidArgument("solve_two_level: bad time range");
  if (stride == 0) throw InvalidArgument("solve_two_level: stride must be positive");
  const auto steps = static_cast<std::size_t>(std::llround((t_final - t0) / dt));
  const double h = steps == 0 ? 0.0 : (t_final - t0) / static_cast<double>(steps);
  const double half = 0.5 * model.detuning;
  std::vector<TwoLevelSample> out;
  out.push_back({t0, initial[0], initial[1]});
  Complex a = initial[0];
  Complex b = initial[1];
  for (std::size_t s = 0; s < steps; ++s) {
    const double tm = t0 + (static_cast<double>(s) + 0.5) * h;
    const double g = model.coupling(tm);
    const double r = std::hypot(half, g);
    if (r * h > 0.5) {
      throw StepSizeError("solve_two_level: dt = " + csv::number(h) +
                          " does not resolve the local frequency " + csv::number(r) +
                          " at t = " + csv::number(tm));
    }
    const double c = std::cos(r * h);
    const double sinc = r > 0.0 ? std::sin(r * h) / r : h;
    const Complex m11(c, -sinc * half);
    const Complex m22(c, sinc * half);
    const Complex m12(0.0, -sinc * g);
    const Complex na = m11 * a + m12 * b;
    const Complex nb = m12 * a + m22 * b;
    a = na;
    b = nb;
    if ((s + 1) % stride == 0 || s + 1 == steps) {
      out.push_back({t0 + static_cast<double>(s + 1) * h, a, b});
    }
  }
  return out;
}

TimeSeries sample_adiabaticity_rate(const EffectiveModel& model, double t0, double t1,
                                    std::size_t points) {
  if (points < 2 || !(t1 > t0)) throw InvalidArgument("sample_adiabaticity_rate: bad range");
  TimeSeries ts;
  ts.t.resize(points);
  ts.value.resize(points);
  const double h = (t1 - t0) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    ts.t[i] = t0 + static_cast<double>(i) * h;
    const PointValue v = adiabaticity_rate(model, ts.t[i]);
    if (v.degenerate) throw DegeneratePointError("sample_adiabaticity_rate: degenerate model");
    ts.value[i] = v.value;
  }
  return ts;
}

std::vector<double> cumulative_integral(const std::vector<double>& t, const std::vector<double>& y) {
  check_uniform(t);
  if (y.size() != t.size()) throw InvalidArgument("cumulative_integral: size mismatch");
  const std::size_t n = t.size();
  const double h = t[1] - t[0];
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double piece;
    if (i == 0) {
      piece = h / 12.0 * (5.0 * y[0] + 8.0 * y[1] - y[2]);
    } else if (i + 2 == n) {
      piece = h / 12.0 * (-y[n - 3] + 8.0 * y[n - 2] + 5.0 * y[n - 1]);
    } else {
      piece = h / 24.0 * (-y[i - 1] + 13.0 * y[i] + 13.0 * y[i + 1] - y[i + 2]);
    }
    out[i + 1] = out[i] + piece;
  }
  return out;
}

InverseCoupling inverse_coupling(const TimeSeries& target, double delta, double initial_coupling) {
  if (delta == 0.0) throw InvalidArgument("inverse_coupling: delta must be nonzero");
  InverseCoupling r;
  r.detuning = delta;
  r.t = target.t;
  const double f0 =
      initial_coupling / (delta * std::sqrt(delta * delta + 4.0 * initial_coupling * initial_coupling));
  r.integral = cumulative_integral(target.t, target.value);
  for (double& f : r.integral) f += f0;

  const std::size_t n = r.t.size();
  r.coupling.resize(n);
  r.rate.resize(n);
  const double d2 = delta * delta;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = r.integral[i];
    const double rem = 1.0 - 4.0 * d2 * f * f;
    if (!(rem > 0.0)) {
      double t_crit = r.t[i];
      if (i > 0) {
        // Linear interpolation of |2 delta f| through 1.
        const double a = std::abs(2.0 * delta * r.integral[i - 1]);
        const double b = std::abs(2.0 * delta * f);
        if (b != a) t_crit = r.t[i - 1] + (1.0 - a) / (b - a) * (r.t[i] - r.t[i - 1]);
      }
      throw InversionDomainError("inverse_coupling: coupling diverges, 2|delta f| reaches 1 at t = " +
                                     csv::number(t_crit),
                                 t_crit);
    }
    r.coupling[i] = delta * std::abs(delta) * f / std::sqrt(rem);
    // dG/df = delta |delta| / (1 - 4 delta^2 f^2)^(3/2) and df/dt = target.
    r.rate[i] = delta * std::abs(delta) / std::pow(rem, 1.5) * target.value[i];
  }
  return r;
}

EffectiveModel InverseCoupling::model() const {
  EffectiveModel m;
  m.detuning = detuning;
  m.provenance = CouplingProvenance::InverseConstructed;
  auto ts = t;
  auto gs = coupling;
  auto rs = rate;
  m.coupling = [ts, gs](double tq) { return lerp_at(ts, gs, tq); };
  m.coupling_rate = [ts, rs](double tq) { return lerp_at(ts, rs, tq); };
  return m;
}

std::vector<double> naive_inverse_coupling(const TimeSeries& target, double delta) {
  const std::vector<double> f = cumulative_integral(target.t, target.value);
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double arg = delta * delta + 4.0 * f[i];
    g[i] = arg > 0.0 ? f[i] / std::sqrt(arg) : std::numeric_limits<double>::quiet_NaN();
  }
  return g;
}

double back_substitution_residual(const InverseCoupling& inverse, const TimeSeries& target) {
  check_uniform(inverse.t);
  const std::size_t n = inverse.t.size();
  const double h = inverse.t[1] - inverse.t[0];
  const auto& g = inverse.coupling;
  const double d = inverse.detuning;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dg;
    if (i >= 2 && i + 2 < n) {
      dg = (g[i - 2] - 8.0 * g[i - 1] + 8.0 * g[i + 1] - g[i + 2]) / (12.0 * h);
    } else if (i < 2) {
      dg = (-25.0 * g[i] + 48.0 * g[i + 1] - 36.0 * g[i + 2] + 16.0 * g[i + 3] - 3.0 * g[i + 4]) /
           (12.0 * h);
    } else {
      dg = (25.0 * g[i] - 48.0 * g[i - 1] + 36.0 * g[i - 2] - 16.0 * g[i - 3] + 3.0 * g[i - 4]) /
           (12.0 * h);
    }
    const double lhs = d * dg / std::pow(d * d + 4.0 * g[i] * g[i], 1.5);
    worst = std::max(worst, std::abs(lhs - target.value[i]));
  }
  return worst;
}

namespace {

// -d Delta_channel / dx; channel 0 rides Delta_+, channel 1 Delta_-.
double channel_force(const ModelParams& params, int channel, double x) {
  const double g = params.coupling(x);
  const double r = std::hypot(0.5 * params.splitting(), g);
  if (r == 0.0) return 0.0;
  const double slope = g * params.coupling_slope(x) / r;
  return channel == 0 ? -slope : slope;
}

double channel_energy(const ModelParams& params, int channel, const ClassicalState& s) {
  const AdiabaticLevels lv = adiabatic_eigenvalues(params, s.x);
  return s.p * s.p / (2.0 * params.mass) + (channel == 0 ? lv.upper : lv.lower);
}

}  // namespace

ClassicalTrajectories classical_trajectories(const ModelParams& params,
                                             std::array<ClassicalState, 2> initial, double t_final,
                                             double dt, std::size_t stride) {
  params.validate();
  if (!(dt > 0.0) || !(t_final >= 0.0) || stride == 0) {
    throw InvalidArgument("classical_trajectories: bad time stepping");
  }
  const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));
  const double m = params.mass;
  ClassicalTrajectories out;
  for (int ch = 0; ch < 2; ++ch) {
    ClassicalState s = initial[static_cast<std::size_t>(ch)];
    auto& path = out[static_cast<std::size_t>(ch)];
    path.push_back({0.0, s.x, s.p, channel_energy(params, ch, s)});
    double force = channel_force(params, ch, s.x);
    for (std::size_t k = 0; k < steps; ++k) {
      const double hx = 1e-5 * std::max(1.0, std::abs(s.x));
      const double stiffness =
          std::abs(channel_force(params, ch, s.x + hx) - channel_force(params, ch, s.x - hx)) / (2.0 * hx);
      if (dt * dt * stiffness / m > 0.25) {
        throw StepSizeError("classical_trajectories: dt too large for the surface curvature at x = " +
                            csv::number(s.x));
      }
      s.p += 0.5 * dt * force;
      s.x += dt * s.p / m;
      force = channel_force(params, ch, s.x);
      s.p += 0.5 * dt * force;
      if ((k + 1) % stride == 0 || k + 1 == steps) {
        path.push_back({static_cast<double>(k + 1) * dt, s.x, s.p, channel_energy(params, ch, s)});
      }
    }
  }
  return out;
}

TimeSeries trajectory_adiabaticity(const ModelParams& params, const ClassicalTrajectories& paths,
                                   ChannelWeights weights) {
  if (paths[0].size() != paths[1].size()) {
    throw InvalidArgument("trajectory_adiabaticity: channel paths have different lengths");
  }
  TimeSeries ts;
  const double w[2] = {weights.upper, weights.lower};
  for (std::size_t k = 0; k < paths[0].size(); ++k) {
    double value = 0.0;
    for (std::size_t ch = 0; ch < 2; ++ch) {
      if (w[ch] == 0.0) continue;
      const ClassicalSample& s = paths[ch][k];
      const AdiabaticLevels lv = adiabatic_eigenvalues(params, s.x);
      const double gap = lv.upper - lv.lower;
      if (gap <= 0.0) throw DegeneratePointError("trajectory_adiabaticity: closed gap on the path");
      value += w[ch] * std::abs(2.0 * dtheta(params, s.x).value * s.p) / (2.0 * params.mass * gap);
    }
    ts.t.push_back(paths[0][k].t);
    ts.value.push_back(value);
  }
  return ts;
}

void write_effective_model_csv(std::ostream& out, const std::vector<double>& t,
                               const std::vector<double>& coupling) {
  out << "t,G\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double row[] = {t[i], coupling[i]};
    csv::write_numbers(out, row);
  }
}

void write_classical_csv(std::ostream& out, const ClassicalTrajectories& paths) {
  out << "t,x_up,p_up,energy_up,x_down,p_down,energy_down\n";
  for (std::size_t k = 0; k < paths[0].size(); ++k) {
    const auto& u = paths[0][k];
    const auto& d = paths[1][k];
    const double row[] = {u.t, u.x, u.p, u.energy, d.x, d.p, d.energy};
    csv::write_numbers(out, row);
  }
}

}  // namespace adiabatica
