#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "demonscatter/channels.hpp"
#include "demonscatter/units_grid.hpp"

namespace demonscatter {

struct DesignParameters {
  double b = 0, c = 0, x0 = 0, delta = 0;

  std::array<double, 4> as_array() const { return {b, c, x0, delta}; }
  static DesignParameters from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }
};

DesignParameters reference_parameters();

/// Target channel-0 probabilities with per-component weights, ordered
/// (|T|^2, |R|^2, |Tt|^2, |Rt|^2).
struct DeviceTarget {
  std::array<double, 4> probabilities{};
  std::array<double, 4> weights{1, 1, 1, 1};

  void validate() const;
  static DeviceTarget half_demon();
  static DeviceTarget transmit_filter();  // T/A
  static DeviceTarget reflect_filter();   // A/R
  static DeviceTarget named(const std::string& name);
};

/// Search box: b, c in [0, 400], x0 in [0, 0.5], delta in [0, 200].
struct SearchBox {
  std::array<double, 4> lower{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> upper{400.0, 400.0, 0.5, 200.0};
};

struct Evaluation {
  double cost = 0;
  Probabilities achieved;
  double D = 0;
};

/// Builds the gamma = 0 two-level model, solves at E = v0^2/2 and returns the
/// weighted squared deviation from the target. Solver failures cost +inf.
Evaluation evaluate_design(const DesignParameters& p, const DeviceTarget& target, double v0, double w,
                           std::size_t grid_points = kDefaultGridPoints);
double cost(const DesignParameters& p, const DeviceTarget& target, double v0, double w,
            std::size_t grid_points = kDefaultGridPoints);

struct EvaluationRecord {
  std::size_t index = 0;
  DesignParameters parameters;
  double cost = 0;
  double D = 0;
};

struct OptimizerOptions {
  std::uint64_t seed = 1;
  std::size_t budget = 5000;  // total evaluations across restarts
  std::size_t restarts = 8;
  std::optional<DesignParameters> init;  // first restart starts here when set
  SearchBox box;
  double initial_step = 0.25;  // simplex edge as a fraction of the box
  std::size_t presample = 150;  // random points per restart; the simplex starts at the best
  std::size_t grid_points = kDefaultGridPoints;
};

inline constexpr double kConvergedCost = 1e-3;

struct OptimizationResult {
  DesignParameters parameters;
  double cost = 0;
  Probabilities achieved;
  double D = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  double initial_cost = 0;
  double max_D = -1;  // over every evaluation made
  std::vector<EvaluationRecord> log;
  std::vector<double> restart_costs;
};

OptimizationResult optimize(const DeviceTarget& target, double v0, double w, const OptimizerOptions& options);

/// Local polish of the reference half-demon design point against the half-demon target.
OptimizationResult refine_reference_point(double v0 = 8.0, std::size_t budget = 600);

}  // namespace demonscatter
