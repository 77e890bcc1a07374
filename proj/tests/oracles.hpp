#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>

#include "demonscatter/coupled_solver.hpp"
#include "demonscatter/nonlocal_solver.hpp"

namespace oracle {

using bf50 = boost::multiprecision::cpp_bin_float_50;

// Textbook transmission through a rectangular barrier of height V0 and width
// a (hbar = m = 1), in 50-digit arithmetic.
inline double barrier_transmission(double E_in, double V0_in, double a_in) {
  using boost::multiprecision::sin;
  using boost::multiprecision::sinh;
  using boost::multiprecision::sqrt;
  const bf50 E(E_in), V0(V0_in), a(a_in);
  bf50 t;
  if (E < V0) {
    const bf50 kap = sqrt(2 * (V0 - E));
    const bf50 s = sinh(kap * a);
    t = 1 / (1 + V0 * V0 * s * s / (4 * E * (V0 - E)));
  } else if (E > V0) {
    const bf50 k2 = sqrt(2 * (E - V0));
    const bf50 s = sin(k2 * a);
    t = 1 / (1 + V0 * V0 * s * s / (4 * E * (E - V0)));
  } else {
    t = 1 / (1 + V0 * a * a / 2);
  }
  return t.convert_to<double>();
}

// Barrier centred at 0; grid nodes on an edge carry the mean of both sides.
inline demonscatter::LocalPotentialModel barrier_model(double V0, double a, const demonscatter::Grid& grid) {
  using namespace demonscatter;
  const double edge_tol = 1e-9 * grid.spacing();
  return sample_model(
      grid, ChannelSet{{0.0}, {}, {}},
      [=](double x) {
        Eigen::MatrixXcd v(1, 1);
        const double ax = std::abs(x);
        v(0, 0) = std::abs(ax - a / 2) < edge_tol ? V0 / 2 : (ax < a / 2 ? V0 : 0.0);
        return v;
      },
      true);
}

// Sum of Gaussian bumps with random Hermitian coefficients; thresholds drawn
// so that at least the ground channel is open at E.
inline demonscatter::LocalPotentialModel random_hermitian_model(std::size_t nc, std::mt19937_64& rng,
                                                                const demonscatter::Grid& grid) {
  using namespace demonscatter;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> thr(-20.0, 40.0);
  std::vector<double> thresholds{0.0};
  for (std::size_t j = 1; j < nc; ++j) thresholds.push_back(thr(rng));
  struct Bump {
    Eigen::MatrixXcd A;
    double centre, width;
  };
  std::vector<Bump> bumps;
  for (int b = 0; b < 3; ++b) {
    Eigen::MatrixXcd A(nc, nc);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = cplx(u(rng), u(rng));
    A = 10.0 * (A + A.adjoint()).eval();
    bumps.push_back({A, 0.3 * u(rng), 0.1 + 0.025 * (u(rng) + 1)});
  }
  return sample_model(
      grid, ChannelSet{thresholds, {}, {}},
      [bumps, nc](double x) {
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(nc, nc);
        for (const auto& b : bumps) {
          const double z = (x - b.centre) / b.width;
          if (z * z < 41.5) v += b.A * std::exp(-z * z);
        }
        return v;
      },
      true);
}

}  // namespace oracle
