#include "demonscatter/units_grid.hpp"

#include <cmath>

#include "demonscatter/errors.hpp"

namespace demonscatter {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidRange: return "invalid-range";
    case ErrorCode::TooFewPoints: return "too-few-points";
    case ErrorCode::NegativeVelocity: return "negative-velocity";
    case ErrorCode::AllChannelsClosed: return "all-channels-closed";
    case ErrorCode::ShapeMismatch: return "shape-mismatch";
    case ErrorCode::IndexOutOfRange: return "index-out-of-range";
    case ErrorCode::ResolutionInsufficient: return "resolution-insufficient";
    case ErrorCode::SingularLinearSystem: return "singular-linear-system";
    case ErrorCode::NonpositiveEnergy: return "nonpositive-energy";
    case ErrorCode::QZero: return "q-zero";
    case ErrorCode::UnsupportedChannelCount: return "unsupported-channel-count";
    case ErrorCode::AsymmetricGrid: return "asymmetric-grid";
    case ErrorCode::InconsistentBoundary: return "inconsistent-boundary";
    case ErrorCode::InfeasiblePair: return "infeasible-pair";
    case ErrorCode::PreconditionViolation: return "precondition-violation";
    case ErrorCode::PotentialNotLocalized: return "potential-not-localized";
    case ErrorCode::Parse: return "parse-error";
  }
  return "unknown";
}

Grid::Grid(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
  if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max))
    throw Error(ErrorCode::InvalidRange, "grid requires x_min < x_max");
  if (n < 3) throw Error(ErrorCode::TooFewPoints, "grid requires at least 3 points");
  h_ = (x_max - x_min) / static_cast<double>(n - 1);
}

std::vector<double> Grid::points() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

std::size_t Grid::nearest_index(double xv) const {
  const double t = std::round((xv - x_min_) / h_);
  if (t <= 0) return 0;
  if (t >= static_cast<double>(n_ - 1)) return n_ - 1;
  return static_cast<std::size_t>(t);
}

bool Grid::symmetric_about_origin(double tol) const {
  return std::abs(x_min_ + x_max_) <= tol * std::max(1.0, x_max_ - x_min_);
}

Grid make_grid(double x_min, double x_max, std::size_t n) { return Grid(x_min, x_max, n); }

Grid default_grid(std::size_t n) { return Grid(-kDefaultBoxHalfWidth, kDefaultBoxHalfWidth, n); }

double gaussian(double x, double w) {
  const double s = (x / w) * (x / w);
  return s > kGaussianCutoffExponent ? 0.0 : std::exp(-s);
}

cplx rabi_eval(const RabiProfile& p, double x) {
  return cplx(0.0, -p.b * gaussian(x - p.x0, p.w)) + cplx(p.c * gaussian(x + p.x0, p.w), 0.0);
}

double velocity_to_energy(double v) {
  if (v < 0 || !std::isfinite(v)) throw Error(ErrorCode::NegativeVelocity, "velocity must be >= 0");
  return 0.5 * v * v;
}

RabiProfile reference_profile() { return RabiProfile{165.874, 103.876, 0.16455, std::sqrt(2.0) / 10.0}; }

}  // namespace demonscatter
