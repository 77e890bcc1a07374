#include "demonscatter/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "demonscatter/coupled_solver.hpp"
#include "demonscatter/demon.hpp"
#include "demonscatter/errors.hpp"
#include "demonscatter/parallel.hpp"

namespace demonscatter {

namespace {
using Point = std::array<double, 4>;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

DesignParameters reference_parameters() {
  const RabiProfile p = reference_profile();
  return {p.b, p.c, p.x0, kReferenceDetuning};
}

void DeviceTarget::validate() const {
  bool any = false;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(probabilities[i] >= 0 && probabilities[i] <= 1))
      throw Error(ErrorCode::PreconditionViolation, "target probabilities must lie in [0, 1]");
    if (!(weights[i] >= 0)) throw Error(ErrorCode::PreconditionViolation, "weights must be >= 0");
    any = any || weights[i] > 0;
  }
  if (!any) throw Error(ErrorCode::PreconditionViolation, "at least one weight must be positive");
}

DeviceTarget DeviceTarget::half_demon() { return {{0.5, 0.0, 0.0, 0.5}, {1, 1, 1, 1}}; }
DeviceTarget DeviceTarget::transmit_filter() { return {{1.0, 0.0, 0.0, 0.0}, {1, 1, 1, 1}}; }
DeviceTarget DeviceTarget::reflect_filter() { return {{0.0, 0.0, 0.0, 1.0}, {1, 1, 1, 1}}; }

DeviceTarget DeviceTarget::named(const std::string& name) {
  if (name == "half-demon") return half_demon();
  if (name == "T/A") return transmit_filter();
  if (name == "A/R") return reflect_filter();
  throw Error(ErrorCode::Parse, "unknown device target '" + name + "'");
}

Evaluation evaluate_design(const DesignParameters& p, const DeviceTarget& target, double v0, double w,
                           std::size_t grid_points) {
  if (!(v0 > 0) || !(w > 0)) throw Error(ErrorCode::PreconditionViolation, "v0 and w must be positive");
  target.validate();
  Evaluation ev;
  try {
    const RabiProfile profile{p.b, p.c, p.x0, w};
    const auto model = build_two_level_model(profile, p.delta, 0.0, default_grid(grid_points));
    const auto sol = solve_local(model, velocity_to_energy(v0));
    ev.achieved = probabilities(extract_channel(sol.S, 0));
  } catch (const Error&) {
    ev.cost = kInf;
    ev.D = std::numeric_limits<double>::quiet_NaN();
    return ev;
  }
  const Point got{ev.achieved.T, ev.achieved.R, ev.achieved.Tt, ev.achieved.Rt};
  for (std::size_t i = 0; i < 4; ++i) ev.cost += target.weights[i] * std::pow(got[i] - target.probabilities[i], 2);
  ev.D = demon_parameter(ev.achieved);
  return ev;
}

double cost(const DesignParameters& p, const DeviceTarget& target, double v0, double w, std::size_t grid_points) {
  return evaluate_design(p, target, v0, w, grid_points).cost;
}

namespace {

struct RunState {
  std::vector<EvaluationRecord> log;
  Point best_point{};
  Evaluation best;
  double max_D = -kInf;
};

// Nelder-Mead on the box rescaled to the unit cube; trial points are clamped
// onto the box.
class BoxedSimplex {
 public:
  BoxedSimplex(const DeviceTarget& target, double v0, double w, const SearchBox& box, std::size_t grid_points,
               std::size_t budget, std::size_t index_offset)
      : target_(target), v0_(v0), w_(w), box_(box), grid_points_(grid_points), budget_(budget),
        offset_(index_offset) {
    state_.best.cost = kInf;
  }

  // A collapsed simplex is rebuilt around the best point until the budget is
  // spent.
  RunState run(const Point& start_unit, double step) {
    Point start = start_unit;
    while (!exhausted()) {
      const std::size_t before = state_.log.size();
      descend(start, step);
      start = to_unit(state_.best_point);
      if (state_.log.size() == before) break;
    }
    return state_;
  }

  /// Evaluates every candidate and returns the cheapest one.
  Point best_of(const std::vector<Point>& candidates) {
    Point best = candidates.front();
    double fbest = kInf;
    for (const auto& c : candidates) {
      if (exhausted()) break;
      const double fc = eval(c);
      if (fc < fbest) fbest = fc, best = c;
    }
    return best;
  }

  Point to_unit(const Point& p) const {
    Point u;
    for (std::size_t d = 0; d < 4; ++d) u[d] = std::clamp((p[d] - box_.lower[d]) / (box_.upper[d] - box_.lower[d]), 0.0, 1.0);
    return u;
  }

 private:
  void descend(const Point& start_unit, double step) {
    std::array<Point, 5> simplex;
    std::array<double, 5> f;
    simplex[0] = start_unit;
    for (std::size_t i = 0; i < 4; ++i) {
      simplex[i + 1] = start_unit;
      simplex[i + 1][i] += simplex[i + 1][i] + step > 1.0 ? -step : step;
    }
    for (std::size_t i = 0; i < 5; ++i) {
      if (exhausted()) return;
      f[i] = eval(simplex[i]);
    }
    while (!exhausted()) {
      std::array<std::size_t, 5> order;
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] < f[b]; });
      const std::size_t lo = order[0], hi = order[4], second = order[3];
      if (std::abs(f[hi] - f[lo]) <= 1e-12 || spread(simplex) < 1e-7) break;

      Point centroid{};
      for (std::size_t i = 0; i < 5; ++i)
        if (i != hi)
          for (std::size_t d = 0; d < 4; ++d) centroid[d] += simplex[i][d] / 4.0;
      auto along = [&](double t) {
        Point p;
        for (std::size_t d = 0; d < 4; ++d) p[d] = std::clamp(centroid[d] + t * (simplex[hi][d] - centroid[d]), 0.0, 1.0);
        return p;
      };
      const Point xr = along(-1.0);
      const double fr = eval(xr);
      if (fr < f[lo]) {
        if (exhausted()) break;
        const Point xe = along(-2.0);
        const double fe = eval(xe);
        if (fe < fr) simplex[hi] = xe, f[hi] = fe;
        else simplex[hi] = xr, f[hi] = fr;
      } else if (fr < f[second]) {
        simplex[hi] = xr, f[hi] = fr;
      } else {
        if (exhausted()) break;
        const bool outside = fr < f[hi];
        const Point xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : f[hi])) {
          simplex[hi] = xc, f[hi] = fc;
        } else {
          for (std::size_t i = 0; i < 5 && !exhausted(); ++i) {
            if (i == lo) continue;
            for (std::size_t d = 0; d < 4; ++d) simplex[i][d] = simplex[lo][d] + 0.5 * (simplex[i][d] - simplex[lo][d]);
            f[i] = eval(simplex[i]);
          }
        }
      }
    }
  }

  Point from_unit(const Point& u) const {
    Point p;
    for (std::size_t d = 0; d < 4; ++d) p[d] = box_.lower[d] + u[d] * (box_.upper[d] - box_.lower[d]);
    return p;
  }

  static double spread(const std::array<Point, 5>& s) {
    double m = 0;
    for (std::size_t i = 1; i < 5; ++i)
      for (std::size_t d = 0; d < 4; ++d) m = std::max(m, std::abs(s[i][d] - s[0][d]));
    return m;
  }

  bool exhausted() const { return state_.log.size() >= budget_; }

  double eval(const Point& unit) {
    const Point p = from_unit(unit);
    const DesignParameters dp = DesignParameters::from_array(p);
    const Evaluation ev = evaluate_design(dp, target_, v0_, w_, grid_points_);
    state_.log.push_back({offset_ + state_.log.size(), dp, ev.cost, ev.D});
    if (std::isfinite(ev.D)) state_.max_D = std::max(state_.max_D, ev.D);
    if (ev.cost < state_.best.cost) {
      state_.best = ev;
      state_.best_point = p;
    }
    return ev.cost;
  }

  const DeviceTarget& target_;
  double v0_, w_;
  SearchBox box_;
  std::size_t grid_points_;
  std::size_t budget_;
  std::size_t offset_;
  RunState state_;
};

OptimizationResult assemble(std::vector<RunState>& runs) {
  OptimizationResult res;
  res.cost = kInf;
  for (auto& r : runs) {
    res.restart_costs.push_back(r.best.cost);
    res.max_D = std::max(res.max_D, r.max_D);
    if (r.best.cost < res.cost) {
      res.cost = r.best.cost;
      res.parameters = DesignParameters::from_array(r.best_point);
      res.achieved = r.best.achieved;
      res.D = r.best.D;
    }
    res.evaluations += r.log.size();
    res.log.insert(res.log.end(), r.log.begin(), r.log.end());
  }
  res.converged = res.cost < kConvergedCost;
  return res;
}

}  // namespace

OptimizationResult optimize(const DeviceTarget& target, double v0, double w, const OptimizerOptions& options) {
  target.validate();
  if (options.budget < 100) throw Error(ErrorCode::PreconditionViolation, "optimizer budget must be >= 100");
  if (options.restarts == 0) throw Error(ErrorCode::PreconditionViolation, "at least one restart is required");
  if (!(v0 > 0) || !(w > 0)) throw Error(ErrorCode::PreconditionViolation, "v0 and w must be positive");

  // starting points are drawn up front so results do not depend on threading
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t per_run = options.budget / options.restarts;
  const std::size_t samples = std::min(options.presample, per_run / 2);
  std::vector<std::vector<Point>> starts(options.restarts, std::vector<Point>(std::max<std::size_t>(samples, 1)));
  for (auto& run : starts)
    for (auto& s : run)
      for (auto& v : s) v = unit(rng);

  std::vector<RunState> runs(options.restarts);
  parallel_for(options.restarts, [&](std::size_t r) {
    BoxedSimplex nm(target, v0, w, options.box, options.grid_points, per_run, r * per_run);
    Point start = starts[r][0];
    if (r == 0 && options.init) {
      start = nm.to_unit(options.init->as_array());
    } else if (samples > 1) {
      start = nm.best_of(starts[r]);
    }
    runs[r] = nm.run(start, options.initial_step);
  });
  OptimizationResult res = assemble(runs);
  if (!runs.empty() && !runs[0].log.empty()) res.initial_cost = runs[0].log.front().cost;
  return res;
}

OptimizationResult refine_reference_point(double v0, std::size_t budget) {
  if (!(v0 > 0)) throw Error(ErrorCode::PreconditionViolation, "v0 must be positive");
  const DeviceTarget target = DeviceTarget::half_demon();
  const double w = reference_profile().w;
  const DesignParameters start = reference_parameters();
  const Evaluation initial = evaluate_design(start, target, v0, w);

  OptimizationResult res;
  if (budget <= 1) {
    res.parameters = start;
    res.cost = res.initial_cost = initial.cost;
    res.achieved = initial.achieved;
    res.D = initial.D;
    res.max_D = initial.D;
    res.evaluations = 1;
    res.log.push_back({0, start, initial.cost, initial.D});
    res.restart_costs = {initial.cost};
    res.converged = initial.cost < kConvergedCost;
    return res;
  }
  SearchBox box;
  BoxedSimplex nm(target, v0, w, box, kDefaultGridPoints, budget, 0);
  std::vector<RunState> runs{nm.run(nm.to_unit(start.as_array()), 0.005)};
  res = assemble(runs);
  res.initial_cost = initial.cost;
  return res;
}

}  // namespace demonscatter
