#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace demonscatter {

using cplx = std::complex<double>;

/// Reduced units: hbar = m = d = 1. Lengths are in d, velocities in
/// v_d = hbar/(m d), times in tau = m d^2/hbar, energies in hbar^2/(m d^2).
struct UnitSystem {
  double d = 1.0;
  double v_d = 1.0;
  double tau = 1.0;
  double V0 = 1.0;  // hbar^2/(m d^3); kept for completeness, unused numerically
  double hbar = 1.0;
  double m = 1.0;
};

inline constexpr double kDefaultBoxHalfWidth = 1.5;
inline constexpr std::size_t kDefaultGridPoints = 2001;

class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t n);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }

  double x(std::size_t i) const { return i + 1 == n_ ? x_max_ : x_min_ + h_ * static_cast<double>(i); }
  std::vector<double> points() const;
  std::size_t nearest_index(double x) const;

  /// Trapezoidal quadrature weight of node i.
  double weight(std::size_t i) const { return (i == 0 || i + 1 == n_) ? 0.5 * h_ : h_; }

  /// True when x_i = -x_{n-1-i} for all i (required by parity transforms).
  bool symmetric_about_origin(double tol = 1e-12) const;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double h_;
};

Grid make_grid(double x_min, double x_max, std::size_t n);
Grid default_grid(std::size_t n = kDefaultGridPoints);

/// Two Gaussian lobes with a relative phase of -i between them:
///   Omega(x) = -i b g(x - x0) + c g(x + x0),  g(x) = exp(-x^2/w^2).
/// Lobes are cut to exactly zero where g < 1e-18.
struct RabiProfile {
  double b = 0.0;
  double c = 0.0;
  double x0 = 0.0;
  double w = 0.14142135623730950488;  // sqrt(2)/10
};

inline constexpr double kGaussianCutoffExponent = 41.5;  // g < 1e-18 beyond this

double gaussian(double x, double w);
cplx rabi_eval(const RabiProfile& profile, double x);

/// E = v^2/2 in reduced units.
double velocity_to_energy(double v);

// Reference half-demon design point at v0 = 8.
RabiProfile reference_profile();
inline constexpr double kReferenceDetuning = 91.211;
inline constexpr double kReferenceVelocity = 8.0;

}  // namespace demonscatter
