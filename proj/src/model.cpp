#include "adiabatica/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "adiabatica/error.hpp"
#include "adiabatica/fft.hpp"

namespace adiabatica {

namespace {

// Delta^2 + 4G^2 below this counts as the degenerate point G = 0, Delta = 0.
constexpr double kDegenerate = 1e-24;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

}  // namespace

TabulatedMode::TabulatedMode(double x_min, double dx, std::vector<double> samples)
    : x_min_(x_min), dx_(dx) {
  if (!(dx > 0.0) || samples.size() < 4) {
    throw InvalidArgument("TabulatedMode: need dx > 0 and at least four samples");
  }
  auto data = std::make_shared<Data>();
  data->dg = spectral_derivative(samples, dx, 1);
  data->d2g = spectral_derivative(samples, dx, 2);
  data->g = std::move(samples);
  data_ = std::move(data);
}

double TabulatedMode::interpolate(const std::vector<double>& v, double x) const {
  // Periodic continuation of the samples.
  const double n = static_cast<double>(v.size());
  double s = std::fmod((x - x_min_) / dx_, n);
  if (s < 0.0) s += n;
  const auto i = static_cast<std::size_t>(s) % v.size();
  const std::size_t j = (i + 1) % v.size();
  const double frac = s - std::floor(s);
  return v[i] + frac * (v[j] - v[i]);
}

ModeShape::ModeShape(Variant shape) : shape_(std::move(shape)) {}

double ModeShape::value(double x) const {
  return std::visit(
      Overloaded{
          [x](const GaussianMode& m) {
            return m.amplitude * kInvSqrt2Pi / m.width * std::exp(-x * x / (2.0 * m.width * m.width));
          },
          [x](const StandingWaveMode& m) { return m.amplitude * std::sin(m.wavenumber * x); },
          [x](const LinearMode& m) { return m.slope * x; },
          [x](const TabulatedMode& m) { return m.value(x); },
      },
      shape_);
}

double ModeShape::first_derivative(double x) const {
  return std::visit(
      Overloaded{
          [this, x](const GaussianMode& m) { return -x / (m.width * m.width) * value(x); },
          [x](const StandingWaveMode& m) {
            return m.amplitude * m.wavenumber * std::cos(m.wavenumber * x);
          },
          [](const LinearMode& m) { return m.slope; },
          [x](const TabulatedMode& m) { return m.first_derivative(x); },
      },
      shape_);
}

double ModeShape::second_derivative(double x) const {
  return std::visit(
      Overloaded{
          [this, x](const GaussianMode& m) {
            const double a2 = m.width * m.width;
            return (x * x / (a2 * a2) - 1.0 / a2) * value(x);
          },
          [x](const StandingWaveMode& m) {
            return -m.amplitude * m.wavenumber * m.wavenumber * std::sin(m.wavenumber * x);
          },
          [](const LinearMode&) { return 0.0; },
          [x](const TabulatedMode& m) { return m.second_derivative(x); },
      },
      shape_);
}

void ModelParams::validate() const {
  if (!(mass > 0.0)) throw InvalidArgument("model: mass must be positive");
  if (photon_number < 1) throw InvalidArgument("model: photon number must be >= 1");
  if (!std::isfinite(detuning)) throw InvalidArgument("model: detuning must be finite");
  std::visit(Overloaded{
                 [](const GaussianMode& m) {
                   if (!(m.width > 0.0)) throw InvalidArgument("model: Gaussian width must be positive");
                 },
                 [](const StandingWaveMode& m) {
                   if (!(m.wavenumber > 0.0)) {
                     throw InvalidArgument("model: standing-wave wavenumber must be positive");
                   }
                 },
                 [](const LinearMode&) {},
                 [](const TabulatedMode&) {},
             },
             mode.variant());
}

double ModelParams::coupling(double x) const { return mode.value(x) * std::sqrt(double(photon_number)); }

double ModelParams::coupling_slope(double x) const {
  return mode.first_derivative(x) * std::sqrt(double(photon_number));
}

double ModelParams::coupling_curvature(double x) const {
  return mode.second_derivative(x) * std::sqrt(double(photon_number));
}

double ModelParams::upper_energy() const {
  return frame == FrameCase::Case1 ? detuning / 2.0 : -detuning * (photon_number - 1);
}

double ModelParams::lower_energy() const {
  return frame == FrameCase::Case1 ? -detuning / 2.0 : -detuning * photon_number;
}

double ModelParams::mean_energy() const { return 0.5 * (upper_energy() + lower_energy()); }

double ModelParams::splitting() const { return detuning; }

SymmetricMatrix2 bare_potential(const ModelParams& params, double x) {
  return {params.upper_energy(), params.coupling(x), params.lower_energy()};
}

PointValue mixing_angle(const ModelParams& params, double x) {
  const double g = params.coupling(x);
  const double de = params.splitting();
  if (de * de + 4.0 * g * g < kDegenerate) return {0.0, true};
  double two_theta = std::atan2(2.0 * g, de);
  // For a negative splitting take 2 theta in [0, 2 pi) so theta stays continuous through G = 0.
  if (de < 0.0 && two_theta < 0.0) two_theta += 2.0 * std::numbers::pi;
  return {0.5 * two_theta, false};
}

AdiabaticLevels adiabatic_eigenvalues(const ModelParams& params, double x) {
  const double g = params.coupling(x);
  const double half = 0.5 * params.splitting();
  const double r = std::hypot(half, g);
  const double mean = params.mean_energy();
  return {mean + r, mean - r};
}

double effective_potential_large_detuning(const ModelParams& params, double x) {
  if (params.detuning == 0.0) {
    throw InvalidArgument("effective_potential_large_detuning: detuning must be nonzero");
  }
  const double g = params.mode.value(x);
  return g * g * params.photon_number / params.detuning;
}

PointValue dtheta(const ModelParams& params, double x) {
  const double d = params.splitting();
  const double g = params.coupling(x);
  const double denom = d * d + 4.0 * g * g;
  if (denom < kDegenerate) return {0.0, true};
  return {d * params.coupling_slope(x) / denom, false};
}

PointValue d2theta(const ModelParams& params, double x) {
  const double d = params.splitting();
  const double g = params.coupling(x);
  const double denom = d * d + 4.0 * g * g;
  if (denom < kDegenerate) return {0.0, true};
  const double g1 = params.coupling_slope(x);
  const double g2 = params.coupling_curvature(x);
  return {d * (g2 * denom - 8.0 * g * g1 * g1) / (denom * denom), false};
}

SymmetricMatrix2 rotate_to_adiabatic(const SymmetricMatrix2& m, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {
      c * c * m.upper + 2.0 * c * s * m.coupling + s * s * m.lower,
      (c * c - s * s) * m.coupling - c * s * (m.upper - m.lower),
      s * s * m.upper - 2.0 * c * s * m.coupling + c * c * m.lower,
  };
}

}  // namespace adiabatica
