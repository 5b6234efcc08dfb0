#include "adiabatica/experiments.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "adiabatica/csv.hpp"
#include "adiabatica/metrics.hpp"
#include "adiabatica/semiclassical.hpp"

namespace adiabatica {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> axis(const SweepBlock& s) {
  std::vector<double> x(s.points);
  const double h = (s.x_max - s.x_min) / double(s.points - 1);
  for (std::size_t i = 0; i < s.points; ++i) x[i] = s.x_min + double(i) * h;
  x.back() = s.x_max;
  return x;
}

// Evaluates cell(i) for every detuning index, in parallel, and rethrows the first failure
// in index order.
template <typename T, typename F>
std::vector<T> over_detunings(std::size_t count, F cell) {
  std::vector<std::optional<T>> results(count);
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) if (count > 1)
  for (long long i = 0; i < n; ++i) {
    try {
      results[static_cast<std::size_t>(i)] = cell(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  std::vector<T> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*results[i]));
  }
  return out;
}

// A single run uses the parallel kernels; a sweep parallelizes over cells instead.
ExecutionPolicy inner_policy(const ScenarioConfig& c) {
  return c.model.detunings.size() > 1 ? ExecutionPolicy::Serial : ExecutionPolicy::Parallel;
}

std::ostringstream start(const ScenarioConfig& c) {
  std::ostringstream out;
  out << header_line(c) << '\n';
  return out;
}

// Matrix layout: header "x,<delta_1>,...", then one row per x.
std::string matrix(const std::vector<double>& xs, const std::vector<double>& detunings,
                   const std::vector<std::vector<double>>& columns) {
  std::ostringstream out;
  out << "x";
  for (double d : detunings) out << ',' << csv::number(d);
  out << '\n';
  std::vector<double> row(detunings.size() + 1);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    row[0] = xs[k];
    for (std::size_t i = 0; i < detunings.size(); ++i) row[i + 1] = columns[i][k];
    csv::write_numbers(out, row);
  }
  return out.str();
}

OutputFile a0_map(const ScenarioConfig& c) {
  const std::vector<double> xs = axis(*c.sweep);
  const double p0 = c.state->p0;
  auto columns = over_detunings<std::vector<double>>(c.model.detunings.size(), [&](std::size_t i) {
    const ModelParams p = c.model.params(c.model.detunings[i]);
    std::vector<double> col;
    col.reserve(xs.size());
    for (double x : xs) col.push_back(approx_A0(p, x, p0).value);
    return col;
  });
  std::ostringstream out = start(c);
  out << matrix(xs, c.model.detunings, columns);
  return {"a0_map.csv", out.str()};
}

OutputFile max_locus(const ScenarioConfig& c) {
  const auto locus = A0_max_locus(c.model.params(c.model.detunings.front()), c.state->p0,
                                  c.model.detunings, c.sweep->x_min, c.sweep->x_max, c.sweep->points);
  std::ostringstream out = start(c);
  out << "delta,x_max,A0_max\n";
  for (const LocusPoint& l : locus) {
    const double row[] = {l.detuning, l.x_max, l.value};
    csv::write_numbers(out, row);
  }
  return {"max_locus.csv", out.str()};
}

std::vector<Trajectory> run_all(const ScenarioConfig& c, bool adiabaticity) {
  const ExecutionPolicy policy = inner_policy(c);
  return over_detunings<Trajectory>(c.model.detunings.size(), [&](std::size_t i) {
    Scenario sc = make_scenario(c, c.model.detunings[i], policy);
    sc.compute_adiabaticity = adiabaticity;
    return run(sc);
  });
}

std::vector<OutputFile> fidelity_map(const ScenarioConfig& c) {
  const std::vector<Trajectory> runs = run_all(c, false);
  const std::vector<double> xs = axis(*c.sweep);
  const StateBlock& st = *c.state;

  std::ostringstream map = start(c);
  std::ostringstream traces = start(c);
  traces << "delta,t,x_mean,x_nominal,abs_F,re_F,im_F\n";
  std::vector<std::vector<double>> columns;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const double d = c.model.detunings[i];
    const FidelityTrace tr = fidelity_trace(runs[i], c.sweep->abscissa, st.x0, st.p0, c.model.mass);
    std::vector<double> col;
    for (double x : xs) col.push_back(resample_first_crossing(tr.abscissa, tr.magnitude, x));
    columns.push_back(std::move(col));
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
      const TrajectorySample& s = runs[i].samples[k];
      const double row[] = {d,
                            s.t,
                            s.x_mean,
                            st.p0 * s.t / c.model.mass + st.x0,
                            tr.magnitude[k],
                            tr.overlap[k].real(),
                            tr.overlap[k].imag()};
      csv::write_numbers(traces, row);
    }
  }
  map << matrix(xs, c.model.detunings, columns);
  return {{"fidelity_map.csv", map.str()}, {"fidelity_traces.csv", traces.str()}};
}

std::vector<OutputFile> atrace(const ScenarioConfig& c) {
  const std::vector<Trajectory> runs = run_all(c, true);
  const double p0 = c.state->p0;
  std::ostringstream out = start(c);
  std::ostringstream traj = start(c);
  out << "delta,t,x_mean,A_t,A_t_first_order,A0,A0_curvature,abs_F\n";
  traj << "delta,t,x_mean,p_mean,norm,pop_up,pop_down,x_up,p_up,x_down,p_down\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const ModelParams p = c.model.params(c.model.detunings[i]);
    for (const TrajectorySample& s : runs[i].samples) {
      const double row[] = {p.detuning,
                            s.t,
                            s.x_mean,
                            s.adiabaticity,
                            s.adiabaticity_first_order,
                            approx_A0(p, s.x_mean, p0).value,
                            approx_A0_with_curvature(p, s.x_mean, p0).value,
                            std::abs(s.fidelity)};
      csv::write_numbers(out, row);
      const double trow[] = {p.detuning,       s.t,           s.x_mean,       s.p_mean,
                             s.norm,           s.populations[0], s.populations[1], s.channel_x[0],
                             s.channel_p[0],   s.channel_x[1],  s.channel_p[1]};
      csv::write_numbers(traj, trow);
    }
  }
  return {{"atrace.csv", out.str()}, {"trajectory.csv", traj.str()}};
}

std::vector<OutputFile> effective_model(const ScenarioConfig& c) {
  const StateBlock& st = *c.state;
  const RunBlock& rb = *c.run;
  const double t_final = *rb.t_final;
  const double dt = rb.dt ? *rb.dt : t_final / 4000.0;
  const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));
  if (steps < 4) throw InvalidArgument("effective-model: t_final / dt must be at least 4");

  std::ostringstream eff = start(c);
  std::ostringstream cls = start(c);
  eff << "delta,t,x_nominal,G_substitution,rate,G_inverse,G_naive\n";
  cls << "delta,t,x_up,p_up,energy_up,x_down,p_down,energy_down\n";
  for (double d : c.model.detunings) {
    const ModelParams p = c.model.params(d);
    const EffectiveModel model = reduce_by_substitution(p, st.p0, st.x0);
    const TimeSeries target = sample_adiabaticity_rate(model, 0.0, t_final, steps + 1);
    std::vector<double> g_inv(target.t.size(), kNaN);
    if (d != 0.0) g_inv = inverse_coupling(target, d, model.coupling(0.0)).coupling;
    const std::vector<double> g_naive = naive_inverse_coupling(target, d);
    for (std::size_t k = 0; k < target.t.size(); ++k) {
      const double t = target.t[k];
      const double row[] = {d, t, st.p0 * t / p.mass + st.x0, model.coupling(t), target.value[k], g_inv[k],
                            g_naive[k]};
      csv::write_numbers(eff, row);
    }
    const ClassicalTrajectories paths =
        classical_trajectories(p, {ClassicalState{st.x0, st.p0}, ClassicalState{st.x0, st.p0}}, t_final, dt,
                               rb.stride);
    for (std::size_t k = 0; k < paths[0].size(); ++k) {
      const auto& u = paths[0][k];
      const auto& w = paths[1][k];
      const double row[] = {d, u.t, u.x, u.p, u.energy, w.x, w.p, w.energy};
      csv::write_numbers(cls, row);
    }
  }
  return {{"effective_model.csv", eff.str()}, {"classical.csv", cls.str()}};
}

std::vector<OutputFile> snapshot(const ScenarioConfig& c) {
  struct Final {
    std::unique_ptr<SpinorField> exact, reference;
  };
  const ExecutionPolicy policy = inner_policy(c);
  auto finals = over_detunings<Final>(c.model.detunings.size(), [&](std::size_t i) {
    Scenario sc = make_scenario(c, c.model.detunings[i], policy);
    sc.compute_adiabaticity = false;
    Final f;
    run(sc, [&](const SampleView& v) {
      f.exact = std::make_unique<SpinorField>(v.exact);
      f.reference = std::make_unique<SpinorField>(v.reference);
    });
    return f;
  });
  std::ostringstream out = start(c);
  out << "delta,x,re_plus,im_plus,re_minus,im_minus,re_up,im_up,re_down,im_down\n";
  for (std::size_t i = 0; i < finals.size(); ++i) {
    const SpinorField& e = *finals[i].exact;
    const SpinorField& r = *finals[i].reference;
    const auto xs = e.grid().positions();
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double row[] = {c.model.detunings[i], xs[k], e.upper()[k].real(), e.upper()[k].imag(),
                            e.lower()[k].real(), e.lower()[k].imag(), r.upper()[k].real(),
                            r.upper()[k].imag(), r.lower()[k].real(), r.lower()[k].imag()};
      csv::write_numbers(out, row);
    }
  }
  return {{"snapshot.csv", out.str()}};
}

}  // namespace

std::string header_line(const ScenarioConfig& config) {
  return std::string("# adiabatica ") + ADIABATICA_VERSION + " | " + config.canonical();
}

double resample_first_crossing(const std::vector<double>& abscissa, const std::vector<double>& values,
                               double x) {
  for (std::size_t i = 0; i + 1 < abscissa.size(); ++i) {
    const double a = abscissa[i];
    const double b = abscissa[i + 1];
    if ((a <= x && x <= b) || (b <= x && x <= a)) {
      if (a == b) return values[i];
      const double s = (x - a) / (b - a);
      return values[i] + s * (values[i + 1] - values[i]);
    }
  }
  return kNaN;
}

std::vector<OutputFile> run_experiment(const ScenarioConfig& config) {
  if (!config.experiment) throw InvalidArgument("run_experiment: no experiment selected");
  switch (*config.experiment) {
    case Experiment::A0Map:
      return {a0_map(config)};
    case Experiment::MaxLocus:
      return {max_locus(config)};
    case Experiment::FidelityMap:
      return fidelity_map(config);
    case Experiment::ATrace:
      return atrace(config);
    case Experiment::EffectiveModel:
      return effective_model(config);
    case Experiment::Snapshot:
      return snapshot(config);
  }
  throw InvalidArgument("run_experiment: unknown experiment");
}

void write_outputs(const std::vector<OutputFile>& files, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const OutputFile& f : files) {
    const auto path = dir / f.name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << f.content;
    if (!out) throw Error("error writing " + path.string());
  }
}

}  // namespace adiabatica
