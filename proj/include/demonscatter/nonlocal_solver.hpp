#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "demonscatter/channels.hpp"
#include "demonscatter/units_grid.hpp"

namespace demonscatter {

/// Quantum-optical parameters of the laser-driven two-level atom.
struct OpticalParameters {
  RabiProfile profile;
  double delta = 0.0;   // detuning, 1/tau
  double gamma = 0.0;   // excited-state decay rate, 1/tau
  double energy = 32.0; // total energy
};

/// Kernel density V(x, y) sampled as K(i, j) = V(x_i, x_j). A local potential
/// V(x) delta(x - y) is represented by K(i, i) = V(x_i) / weight(i).
struct NonlocalKernel {
  Grid grid = default_grid();
  Eigen::MatrixXcd K;
  std::optional<OpticalParameters> descriptor;
};

NonlocalKernel local_kernel(const Grid& grid, const std::function<cplx(double)>& potential);

/// Single-channel amplitudes from the Lippmann-Schwinger equation with the
/// outgoing free Green's function, discretized with trapezoidal Nystrom
/// weights. Left and right incidence share one factorization.
ChannelAmplitudes solve_nonlocal(const NonlocalKernel& kernel, double k);

/// Richardson extrapolation (second order) from `fine` and the grid with half
/// as many intervals.
ChannelAmplitudes solve_nonlocal_extrapolated(const std::function<NonlocalKernel(const Grid&)>& factory,
                                              const Grid& fine, double k);

/// Residuals of the kernel against its images under conjugation, transposition
/// and argument inversion. Parity-type entries are empty on asymmetric grids.
struct KernelResiduals {
  double transpose = 0;            // |K - K^T|
  double hermitian = 0;            // |K - K^dagger|
  double conjugate = 0;            // |K - K*|
  std::optional<double> parity;                // K(x,y) vs K(-x,-y)
  std::optional<double> parity_pseudohermitian;// K(x,y) vs K(-y,-x)*
  std::optional<double> pt;                    // K(x,y) vs K(-x,-y)*
  std::optional<double> pt_pseudohermitian;    // K(x,y) vs K(-y,-x)
  double max_abs = 0;
};

KernelResiduals symmetrize_checks(const NonlocalKernel& kernel);

/// Argument inversion x -> -x on both indices (requires a grid symmetric
/// about the origin).
Eigen::MatrixXcd flip_arguments(const Eigen::MatrixXcd& K);

}  // namespace demonscatter
