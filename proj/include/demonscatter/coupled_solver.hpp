#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "demonscatter/channels.hpp"
#include "demonscatter/units_grid.hpp"

namespace demonscatter {

/// Coupling matrix V(x) (energy units) sampled on a grid. `sampler`, when
/// present, regenerates V at arbitrary x so the model can be resampled.
struct LocalPotentialModel {
  Grid grid = default_grid();
  ChannelSet channels;
  std::vector<Eigen::MatrixXcd> V;
  bool hermitian = true;
  std::function<Eigen::MatrixXcd(double)> sampler;

  std::size_t n_channels() const { return channels.size(); }
  /// Checks shapes, localization at the grid ends and the Hermiticity claim.
  void validate() const;
};

LocalPotentialModel sample_model(const Grid& grid, ChannelSet channels,
                                 std::function<Eigen::MatrixXcd(double)> sampler, bool hermitian);
LocalPotentialModel resample(const LocalPotentialModel& model, const Grid& grid);

/// Ground state |0> and excited state |1> coupled by a laser. Thresholds are
/// {0, -delta}, the excited width is gamma, and
///   V(x) = [[0, Omega(x)/2], [conj(Omega(x))/2, 0]].
LocalPotentialModel build_two_level_model(const RabiProfile& profile, double delta, double gamma,
                                          const Grid& grid);

struct SolveDiagnostics {
  double unitarity_defect = 0.0;
  double min_points_per_wavelength = 0.0;
  bool resolution_warning = false;
  std::optional<double> convergence_estimate;
};

struct ScatterSolution {
  SMatrix S;
  ChannelKinematics kinematics;
  SolveDiagnostics diagnostics;
};

ScatterSolution solve_local(const LocalPotentialModel& model, double E);

std::vector<ScatterSolution> convergence_sweep(const LocalPotentialModel& model, double E,
                                               const std::vector<std::size_t>& resolutions);

inline constexpr double kMinPointsPerWavelength = 20.0;

}  // namespace demonscatter
