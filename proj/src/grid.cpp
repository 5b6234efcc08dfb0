#include "adiabatica/grid.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "adiabatica/csv.hpp"
#include "adiabatica/error.hpp"

namespace adiabatica {

Grid::Grid(std::size_t points, double x_min, double x_max)
    : x_min_(x_min), x_max_(x_max) {
  if (points < 4 || !std::has_single_bit(points)) {
    throw InvalidArgument("grid: number of points must be a power of two >= 4, got " +
                          std::to_string(points));
  }
  if (!(x_max > x_min)) throw InvalidArgument("grid: x_max must exceed x_min");
  dx_ = (x_max - x_min) / static_cast<double>(points);
  dk_ = 2.0 * std::numbers::pi / (static_cast<double>(points) * dx_);
  x_.resize(points);
  k_.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    x_[i] = x_min + static_cast<double>(i) * dx_;
    const double j = i < points / 2 ? static_cast<double>(i)
                                    : static_cast<double>(i) - static_cast<double>(points);
    k_[i] = j * dk_;
  }
  single_ = std::make_shared<const FourierTransform>(points, 1);
  pair_ = std::make_shared<const FourierTransform>(points, 2);
}

double Grid::nyquist() const noexcept { return std::numbers::pi / dx_; }

bool Grid::same_as(const Grid& other) const noexcept {
  return size() == other.size() && x_min_ == other.x_min_ && x_max_ == other.x_max_;
}

SpinorField::SpinorField(GridPtr grid, Basis basis)
    : grid_(std::move(grid)), basis_(basis) {
  if (!grid_) throw InvalidArgument("SpinorField: null grid");
  data_.assign(2 * grid_->size(), Complex{});
}

std::span<Complex> SpinorField::component(Channel c) noexcept {
  const std::size_t n = grid_->size();
  return std::span<Complex>(data_).subspan(c == Channel::Upper ? 0 : n, n);
}

std::span<const Complex> SpinorField::component(Channel c) const noexcept {
  const std::size_t n = grid_->size();
  return std::span<const Complex>(data_).subspan(c == Channel::Upper ? 0 : n, n);
}

double SpinorField::population(Channel c, ExecutionPolicy p) const {
  return kernels::density(p, component(c)) * grid_->dx();
}

double SpinorField::norm(ExecutionPolicy p) const {
  return population(Channel::Upper, p) + population(Channel::Lower, p);
}

AdiabaticFrame AdiabaticFrame::build(const ModelParams& params, GridPtr grid) {
  params.validate();
  AdiabaticFrame f;
  const std::size_t n = grid->size();
  f.grid = grid;
  f.coupling.resize(n);
  f.theta.resize(n);
  f.cos_theta.resize(n);
  f.sin_theta.resize(n);
  f.dtheta.resize(n);
  f.d2theta.resize(n);
  f.upper.resize(n);
  f.lower.resize(n);
  f.mean_energy = params.mean_energy();
  const auto xs = grid->positions();

  std::vector<double> slope, curvature;
  if (!params.mode.is_analytic()) {
    for (std::size_t i = 0; i < n; ++i) f.coupling[i] = params.coupling(xs[i]);
    slope = spectral_derivative(f.coupling, grid->dx(), 1);
    curvature = spectral_derivative(f.coupling, grid->dx(), 2);
  }

  const double d = params.splitting();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i];
    const PointValue th = mixing_angle(params, x);
    const AdiabaticLevels lv = adiabatic_eigenvalues(params, x);
    f.theta[i] = th.value;
    f.cos_theta[i] = std::cos(th.value);
    f.sin_theta[i] = std::sin(th.value);
    f.upper[i] = lv.upper;
    f.lower[i] = lv.lower;
    if (th.degenerate) f.degenerate_points.push_back(i);
    if (params.mode.is_analytic()) {
      f.coupling[i] = params.coupling(x);
      f.dtheta[i] = adiabatica::dtheta(params, x).value;
      f.d2theta[i] = adiabatica::d2theta(params, x).value;
    } else if (th.degenerate) {
      f.dtheta[i] = 0.0;
      f.d2theta[i] = 0.0;
    } else {
      const double g = f.coupling[i];
      const double denom = d * d + 4.0 * g * g;
      f.dtheta[i] = d * slope[i] / denom;
      f.d2theta[i] = d * (curvature[i] * denom - 8.0 * g * slope[i] * slope[i]) / (denom * denom);
    }
  }
  return f;
}

SpinorField make_gaussian_state(GridPtr grid, double x0, double p0, double width, Basis basis,
                                Complex upper_amplitude, Complex lower_amplitude) {
  if (!(width > 0.0)) throw InvalidArgument("gaussian state: width must be positive");
  if (x0 - 5.0 * width < grid->x_min() || x0 + 5.0 * width > grid->x_max()) {
    throw DomainGuardError("gaussian state: packet at x0 = " + csv::number(x0) +
                           " is closer than 5 widths to the domain edge");
  }
  SpinorField f(grid, basis);
  const double amp = std::pow(std::numbers::pi * width * width, -0.25);
  const auto xs = grid->positions();
  auto up = f.upper();
  auto lo = f.lower();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double u = (xs[i] - x0) / width;
    const Complex env = amp * std::exp(-0.5 * u * u) * std::polar(1.0, p0 * xs[i]);
    up[i] = upper_amplitude * env;
    lo[i] = lower_amplitude * env;
  }
  return f;
}

SpinorField make_gaussian_bare_state(GridPtr grid, double x0, double p0, double width) {
  return make_gaussian_state(std::move(grid), x0, p0, width, Basis::Bare, 1.0, 0.0);
}

namespace {

void check_frame(const SpinorField& field, const AdiabaticFrame& frame) {
  if (!frame.grid || !field.grid().same_as(*frame.grid)) {
    throw InvalidArgument("frame and field live on different grids");
  }
}

}  // namespace

SpinorField to_adiabatic(const SpinorField& field, const AdiabaticFrame& frame, ExecutionPolicy p) {
  if (field.basis() != Basis::Bare) throw InvalidArgument("to_adiabatic: field is not in the bare basis");
  check_frame(field, frame);
  SpinorField out = field;
  kernels::rotate(p, out.upper(), out.lower(), frame.cos_theta, frame.sin_theta, false);
  out.set_basis(Basis::Adiabatic);
  return out;
}

SpinorField to_bare(const SpinorField& field, const AdiabaticFrame& frame, ExecutionPolicy p) {
  if (field.basis() != Basis::Adiabatic) {
    throw InvalidArgument("to_bare: field is not in the adiabatic basis");
  }
  check_frame(field, frame);
  SpinorField out = field;
  kernels::rotate(p, out.upper(), out.lower(), frame.cos_theta, frame.sin_theta, true);
  out.set_basis(Basis::Bare);
  return out;
}

bool needs_frame(Observable o) noexcept {
  switch (o) {
    case Observable::Position:
    case Observable::Momentum:
    case Observable::MomentumSquared:
      return false;
    default:
      return true;
  }
}

namespace {

// Weighted sum over momentum space: sum_j w(k_j) |psi_hat_j|^2 / sum_j |psi_hat_j|^2.
template <class W>
double momentum_average(const SpinorField& field, Channel c, W weight) {
  const Grid& grid = field.grid();
  ComplexVector buf(field.component(c).begin(), field.component(c).end());
  grid.transform().forward(buf);
  const auto ks = grid.momenta();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < buf.size(); ++j) {
    const double d = std::norm(buf[j]);
    num += weight(ks[j]) * d;
    den += d;
  }
  return num / den;
}

}  // namespace

Complex expectation(const SpinorField& field, Channel c, Observable o, const AdiabaticFrame* frame,
                    ExecutionPolicy p) {
  const Grid& grid = field.grid();
  const auto psi = field.component(c);
  const double norm = kernels::density(p, psi);
  if (!(norm > 0.0) || norm * grid.dx() < 1e-300) {
    throw InvalidArgument("expectation: component has zero population");
  }
  if (needs_frame(o)) {
    if (frame == nullptr) throw InvalidArgument("expectation: observable requires an adiabatic frame");
    check_frame(field, *frame);
  }
  switch (o) {
    case Observable::Position:
      return kernels::weighted_density(p, psi, grid.positions()) / norm;
    case Observable::Momentum:
      return momentum_average(field, c, [](double k) { return k; });
    case Observable::MomentumSquared:
      return momentum_average(field, c, [](double k) { return k * k; });
    case Observable::Coupling:
      return kernels::weighted_density(p, psi, frame->coupling) / norm;
    case Observable::UpperSurface:
      return kernels::weighted_density(p, psi, frame->upper) / norm;
    case Observable::LowerSurface:
      return kernels::weighted_density(p, psi, frame->lower) / norm;
    case Observable::ThetaCurvature:
      return kernels::weighted_density(p, psi, frame->d2theta) / norm;
    case Observable::ThetaSlopeMomentum: {
      ComplexVector ppsi(psi.begin(), psi.end());
      grid.transform().forward(ppsi);
      const auto ks = grid.momenta();
      const double inv_n = 1.0 / static_cast<double>(grid.size());
      for (std::size_t j = 0; j < ppsi.size(); ++j) ppsi[j] *= ks[j] * inv_n;
      grid.transform().backward(ppsi);
      return kernels::weighted_inner(p, psi, frame->dtheta, ppsi) / norm;
    }
  }
  return {};
}

double position_variance(const SpinorField& field, Channel c, ExecutionPolicy p) {
  const auto psi = field.component(c);
  const double norm = kernels::density(p, psi);
  if (!(norm > 0.0)) throw InvalidArgument("position_variance: component has zero population");
  const double mean = kernels::weighted_density(p, psi, field.grid().positions()) / norm;
  std::vector<double> w(field.grid().size());
  const auto xs = field.grid().positions();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (xs[i] - mean) * (xs[i] - mean);
  return kernels::weighted_density(p, psi, w) / norm;
}

DensityMoments total_position_moments(const SpinorField& field, ExecutionPolicy p) {
  const auto xs = field.grid().positions();
  const double norm = kernels::density(p, field.data());
  if (!(norm > 0.0)) throw InvalidArgument("total_position_moments: zero norm");
  const double mean = (kernels::weighted_density(p, field.upper(), xs) +
                       kernels::weighted_density(p, field.lower(), xs)) /
                      norm;
  std::vector<double> w(xs.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (xs[i] - mean) * (xs[i] - mean);
  const double var =
      (kernels::weighted_density(p, field.upper(), w) + kernels::weighted_density(p, field.lower(), w)) /
      norm;
  return {mean, var};
}

double momentum_norm(const SpinorField& field) {
  const Grid& grid = field.grid();
  ComplexVector buf(field.data().begin(), field.data().end());
  grid.pair_transform().forward(buf);
  double sum = 0.0;
  for (const Complex& z : buf) sum += std::norm(z);
  return sum * grid.dx() / static_cast<double>(grid.size());
}

void write_snapshot_csv(std::ostream& out, const SpinorField& field) {
  out << "x,re_a,im_a,re_b,im_b\n";
  const auto xs = field.grid().positions();
  const auto a = field.upper();
  const auto b = field.lower();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double row[] = {xs[i], a[i].real(), a[i].imag(), b[i].real(), b[i].imag()};
    csv::write_numbers(out, row);
  }
}

}  // namespace adiabatica
