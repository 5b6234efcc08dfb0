#pragma once

// Two-channel Jaynes-Cummings model with quantized centre-of-mass motion, restricted to
// one excitation-number block, and its position-dependent adiabatic diagonalization.
//
// Units: hbar = 1 throughout; the mass defaults to 1.

#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace adiabatica {

/// g(x) = A / (sqrt(2 pi) a) * exp(-x^2 / 2a^2).
struct GaussianMode {
  double amplitude = 1.0;
  double width = 1.0;
};

/// g(x) = A sin(q x).
struct StandingWaveMode {
  double amplitude = 1.0;
  double wavenumber = 1.0;
};

/// g(x) = C x, the local shape of any coupling around a node.
struct LinearMode {
  double slope = 1.0;
};

/// Uniform periodic samples of g. Derivatives are obtained spectrally on the sample
/// grid; evaluation between samples is linear, so prefer the analytic shapes.
class TabulatedMode {
 public:
  TabulatedMode(double x_min, double dx, std::vector<double> samples);

  double x_min() const noexcept { return x_min_; }
  double dx() const noexcept { return dx_; }
  std::span<const double> samples() const noexcept { return data_->g; }

  double value(double x) const { return interpolate(data_->g, x); }
  double first_derivative(double x) const { return interpolate(data_->dg, x); }
  double second_derivative(double x) const { return interpolate(data_->d2g, x); }

 private:
  struct Data {
    std::vector<double> g, dg, d2g;
  };
  double interpolate(const std::vector<double>& v, double x) const;

  double x_min_;
  double dx_;
  std::shared_ptr<const Data> data_;
};

/// The spatial profile of the cavity mode, g(x), with its first two derivatives.
class ModeShape {
 public:
  using Variant = std::variant<GaussianMode, StandingWaveMode, LinearMode, TabulatedMode>;

  ModeShape() : shape_(LinearMode{0.0}) {}
  ModeShape(Variant shape);

  static ModeShape gaussian(double amplitude, double width) { return {GaussianMode{amplitude, width}}; }
  static ModeShape standing_wave(double amplitude, double wavenumber) {
    return {StandingWaveMode{amplitude, wavenumber}};
  }
  static ModeShape linear(double slope) { return {LinearMode{slope}}; }
  /// g == 0 everywhere.
  static ModeShape none() { return linear(0.0); }

  double value(double x) const;
  double first_derivative(double x) const;
  double second_derivative(double x) const;

  const Variant& variant() const noexcept { return shape_; }
  bool is_analytic() const noexcept { return !std::holds_alternative<TabulatedMode>(shape_); }

 private:
  Variant shape_;
};

/// Which multiple of the excitation number is removed by the rotating frame.
enum class FrameCase {
  Case1,  ///< Lambda = omega: eps_pm = +-Delta/2.
  Case2,  ///< Lambda = Omega: eps_+ = -Delta (n-1), eps_- = -Delta n.
};

struct ModelParams {
  double mass = 1.0;
  /// Delta = Omega - omega.
  double detuning = 0.0;
  /// Photon index n labelling the block {|+, n-1>, |-, n>}.
  int photon_number = 1;
  FrameCase frame = FrameCase::Case1;
  ModeShape mode;

  /// Throws InvalidArgument unless n >= 1 and m > 0 and the mode parameters are sane.
  void validate() const;

  /// G(x) = g(x) sqrt(n).
  double coupling(double x) const;
  double coupling_slope(double x) const;
  double coupling_curvature(double x) const;

  double upper_energy() const;  ///< eps_+
  double lower_energy() const;  ///< eps_-
  double mean_energy() const;   ///< (eps_+ + eps_-) / 2
  double splitting() const;     ///< eps_+ - eps_-, equal to Delta in both frames
};

/// Real symmetric 2x2 matrix [[upper, coupling], [coupling, lower]].
struct SymmetricMatrix2 {
  double upper = 0.0;
  double coupling = 0.0;
  double lower = 0.0;
};

/// A value that is undefined (or infinite) when G = 0 and the splitting vanishes.
struct PointValue {
  double value = 0.0;
  bool degenerate = false;
};

struct AdiabaticLevels {
  double upper = 0.0;  ///< Delta_+
  double lower = 0.0;  ///< Delta_-
};

/// V(x) in the selected rotating frame.
SymmetricMatrix2 bare_potential(const ModelParams& params, double x);

/// theta = atan2(2G, Delta_eps) / 2, in (-pi/2, pi/2].
PointValue mixing_angle(const ModelParams& params, double x);

/// Eigenvalues of V(x): mean +- sqrt((Delta_eps/2)^2 + G^2).
AdiabaticLevels adiabatic_eigenvalues(const ModelParams& params, double x);

/// g(x)^2 n / Delta, the large-detuning surface. Throws InvalidArgument for Delta == 0.
double effective_potential_large_detuning(const ModelParams& params, double x);

/// d theta / dx = Delta G' / (Delta^2 + 4 G^2). Zero (and flagged) at degenerate points.
PointValue dtheta(const ModelParams& params, double x);

/// d^2 theta / dx^2 = Delta [G'' (Delta^2 + 4G^2) - 8 G G'^2] / (Delta^2 + 4G^2)^2.
PointValue d2theta(const ModelParams& params, double x);

/// Rotation U(x) = [[cos, sin], [-sin, cos]] applied to the 2x2 matrix m: U m U^T.
SymmetricMatrix2 rotate_to_adiabatic(const SymmetricMatrix2& m, double theta);

}  // namespace adiabatica
