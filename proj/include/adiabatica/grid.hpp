#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "adiabatica/fft.hpp"
#include "adiabatica/kernels.hpp"
#include "adiabatica/model.hpp"

namespace adiabatica {

/// Uniform periodic grid on [x_min, x_max) with N = 2^k points and its DFT momenta.
class Grid {
 public:
  Grid(std::size_t points, double x_min, double x_max);

  std::size_t size() const noexcept { return x_.size(); }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double dx() const noexcept { return dx_; }
  double dk() const noexcept { return dk_; }
  /// pi / dx
  double nyquist() const noexcept;

  std::span<const double> positions() const noexcept { return x_; }
  /// Momenta in standard DFT order (0, dk, ..., -dk).
  std::span<const double> momenta() const noexcept { return k_; }

  /// Transform of a single component (batch 1) and of both components at once (batch 2).
  const FourierTransform& transform() const noexcept { return *single_; }
  const FourierTransform& pair_transform() const noexcept { return *pair_; }

  bool same_as(const Grid& other) const noexcept;

 private:
  double x_min_, x_max_, dx_, dk_;
  std::vector<double> x_, k_;
  std::shared_ptr<const FourierTransform> single_;
  std::shared_ptr<const FourierTransform> pair_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(std::size_t points, double x_min, double x_max) {
  return std::make_shared<const Grid>(points, x_min, x_max);
}

/// Which internal basis the two components of a spinor refer to.
enum class Basis {
  Bare,       ///< (|+, n-1>, |-, n>)
  Adiabatic,  ///< (|up>, |down>), the eigenvectors of V(x) with eigenvalues Delta_+ and Delta_-
};

/// Component index: Upper is + (bare) or up (adiabatic), Lower is - or down.
enum class Channel { Upper = 0, Lower = 1 };

/// Two-component wave function sampled on a grid. Both components live in one buffer of
/// length 2N (upper first) so that they can be transformed in a single batched FFT.
class SpinorField {
 public:
  SpinorField(GridPtr grid, Basis basis);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  Basis basis() const noexcept { return basis_; }
  void set_basis(Basis b) noexcept { basis_ = b; }

  std::span<Complex> component(Channel c) noexcept;
  std::span<const Complex> component(Channel c) const noexcept;
  std::span<Complex> upper() noexcept { return component(Channel::Upper); }
  std::span<Complex> lower() noexcept { return component(Channel::Lower); }
  std::span<const Complex> upper() const noexcept { return component(Channel::Upper); }
  std::span<const Complex> lower() const noexcept { return component(Channel::Lower); }
  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  /// integral |psi_c|^2 dx
  double population(Channel c, ExecutionPolicy p = ExecutionPolicy::Serial) const;
  /// Sum of both populations.
  double norm(ExecutionPolicy p = ExecutionPolicy::Serial) const;

 private:
  GridPtr grid_;
  Basis basis_;
  ComplexVector data_;
};

/// theta, its derivatives and the adiabatic surfaces tabulated on a grid.
struct AdiabaticFrame {
  GridPtr grid;
  std::vector<double> coupling;  ///< G(x)
  std::vector<double> theta;
  std::vector<double> cos_theta;
  std::vector<double> sin_theta;
  std::vector<double> dtheta;
  std::vector<double> d2theta;
  std::vector<double> upper;  ///< Delta_+(x)
  std::vector<double> lower;  ///< Delta_-(x)
  double mean_energy = 0.0;
  /// Grid indices where G = 0 and the splitting vanishes.
  std::vector<std::size_t> degenerate_points;

  /// Tabulates the frame. Tabulated mode shapes are sampled on the grid and differentiated
  /// spectrally; analytic shapes use their closed forms.
  static AdiabaticFrame build(const ModelParams& params, GridPtr grid);
};

/// Upper bare component (pi dX^2)^(-1/4) exp(-(x-x0)^2 / 2 dX^2) exp(i p0 x), lower zero.
/// Throws DomainGuardError if the packet is not at least 5 dX away from both edges.
SpinorField make_gaussian_bare_state(GridPtr grid, double x0, double p0, double width);

/// Same Gaussian envelope with arbitrary internal amplitudes in the given basis.
SpinorField make_gaussian_state(GridPtr grid, double x0, double p0, double width, Basis basis,
                                Complex upper_amplitude, Complex lower_amplitude);

/// Pointwise U(x) psi. Throws InvalidArgument unless the field is in the bare basis.
SpinorField to_adiabatic(const SpinorField& field, const AdiabaticFrame& frame,
                         ExecutionPolicy p = ExecutionPolicy::Serial);
/// Pointwise U(x)^T psi. Throws InvalidArgument unless the field is in the adiabatic basis.
SpinorField to_bare(const SpinorField& field, const AdiabaticFrame& frame,
                    ExecutionPolicy p = ExecutionPolicy::Serial);

enum class Observable {
  Position,
  Momentum,
  MomentumSquared,
  Coupling,            ///< G(x)
  UpperSurface,        ///< Delta_+(x)
  LowerSurface,        ///< Delta_-(x)
  ThetaSlopeMomentum,  ///< (d theta)(x) p, operator order as written: derivative first
  ThetaCurvature,      ///< d^2 theta (x)
};

bool needs_frame(Observable o) noexcept;

/// <psi_c| O |psi_c> / <psi_c|psi_c> for one component. ThetaSlopeMomentum is not Hermitian
/// and may be complex; all other observables are real up to rounding.
/// Throws InvalidArgument for a zero-population component or a missing frame.
Complex expectation(const SpinorField& field, Channel c, Observable o,
                    const AdiabaticFrame* frame = nullptr,
                    ExecutionPolicy p = ExecutionPolicy::Serial);

/// Variance of x for one component (normalized).
double position_variance(const SpinorField& field, Channel c,
                         ExecutionPolicy p = ExecutionPolicy::Serial);

/// Position moments of the total density |psi_+|^2 + |psi_-|^2 (normalized).
struct DensityMoments {
  double mean = 0.0;
  double variance = 0.0;
};
DensityMoments total_position_moments(const SpinorField& field,
                                      ExecutionPolicy p = ExecutionPolicy::Serial);

/// Momentum-space norm (Parseval): sum |psi_hat|^2 dk / (2 pi) over both components.
double momentum_norm(const SpinorField& field);

/// CSV with columns x, re_a, im_a, re_b, im_b.
void write_snapshot_csv(std::ostream& out, const SpinorField& field);

}  // namespace adiabatica
