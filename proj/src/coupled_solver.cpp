#include "demonscatter/coupled_solver.hpp"

#include <cmath>
#include <numbers>

#include "demonscatter/errors.hpp"

namespace demonscatter {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

void LocalPotentialModel::validate() const {
  channels.validate();
  const auto n = static_cast<Index>(channels.size());
  if (V.size() != grid.size()) throw Error(ErrorCode::ShapeMismatch, "one coupling matrix per grid point required");
  double vmax = 0.0;
  for (const auto& v : V) {
    if (v.rows() != n || v.cols() != n) throw Error(ErrorCode::ShapeMismatch, "coupling matrix size must match channel count");
    vmax = std::max(vmax, v.cwiseAbs().maxCoeff());
  }
  const double edge = std::max(V.front().cwiseAbs().maxCoeff(), V.back().cwiseAbs().maxCoeff());
  if (edge > 1e-12 * vmax) throw Error(ErrorCode::PotentialNotLocalized, "potential must vanish at both grid ends");
  if (hermitian) {
    for (const auto& v : V)
      if ((v - v.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, vmax))
        throw Error(ErrorCode::PreconditionViolation, "model declared Hermitian but V(x) != V(x)^dagger");
    for (std::size_t j = 0; j < channels.size(); ++j)
      if (channels.width(j) != 0.0)
        throw Error(ErrorCode::PreconditionViolation, "model declared Hermitian but a channel has a width");
  }
}

LocalPotentialModel sample_model(const Grid& grid, ChannelSet channels,
                                 std::function<MatrixXcd(double)> sampler, bool hermitian) {
  LocalPotentialModel m{grid, std::move(channels), {}, hermitian, std::move(sampler)};
  m.V.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) m.V.push_back(m.sampler(grid.x(i)));
  m.validate();
  return m;
}

LocalPotentialModel resample(const LocalPotentialModel& model, const Grid& grid) {
  if (!model.sampler) throw Error(ErrorCode::PreconditionViolation, "model has no sampler; cannot change resolution");
  return sample_model(grid, model.channels, model.sampler, model.hermitian);
}

LocalPotentialModel build_two_level_model(const RabiProfile& profile, double delta, double gamma,
                                          const Grid& grid) {
  if (gamma < 0) throw Error(ErrorCode::InvalidRange, "gamma must be >= 0");
  ChannelSet ch{{0.0, -delta}, {0.0, gamma}, {"ground", "excited"}};
  auto sampler = [profile](double x) {
    const cplx om = rabi_eval(profile, x);
    MatrixXcd v = MatrixXcd::Zero(2, 2);
    v(0, 1) = 0.5 * om;
    v(1, 0) = 0.5 * std::conj(om);
    return v;
  };
  return sample_model(grid, std::move(ch), sampler, gamma == 0.0);
}

namespace {

// Discrete plane waves of the Numerov recurrence in the asymptotic region:
// F_n = a_j lambda_j^n with lambda = exp(i theta), Im theta >= 0.
struct AsymptoticModes {
  VectorXcd theta;
  VectorXcd lambda;
  VectorXcd numerov_a;  // diagonal of 1 + h^2 W / 12
};

// Solution coefficients for unit incidence from the left in each open channel,
// referred to the first and last grid node respectively.
struct LeftIncidence {
  MatrixXcd transmitted;  // N x N_open, psi at last node
  MatrixXcd reflected;    // N x N_open, reflected amplitude at first node
};

MatrixXcd wave_matrix(const MatrixXcd& v, const ChannelSet& ch, double E) {
  // W = 2 (E - eps + i width/2 - V)
  MatrixXcd w = -2.0 * v;
  for (std::size_t j = 0; j < ch.size(); ++j) {
    const auto jj = static_cast<Index>(j);
    w(jj, jj) += 2.0 * (cplx(E, 0.0) - ch.asymptotic_energy(j));
  }
  return w;
}

MatrixXcd numerov_u(const MatrixXcd& w, double h) {
  const auto n = w.rows();
  const MatrixXcd id = MatrixXcd::Identity(n, n);
  const MatrixXcd a = id + (h * h / 12.0) * w;
  const MatrixXcd b = 2.0 * (id - (5.0 * h * h / 12.0) * w);
  return b * a.inverse();
}

AsymptoticModes asymptotic_modes(const ChannelSet& ch, double E, double h) {
  const auto n = static_cast<Index>(ch.size());
  AsymptoticModes m{VectorXcd(n), VectorXcd(n), VectorXcd(n)};
  for (Index j = 0; j < n; ++j) {
    const cplx w = 2.0 * (cplx(E, 0.0) - ch.asymptotic_energy(static_cast<std::size_t>(j)));
    const cplx a = 1.0 + h * h * w / 12.0;
    const cplx u = 2.0 * (1.0 - 5.0 * h * h * w / 12.0) / a;
    cplx th = std::acos(0.5 * u);
    if (th.imag() < 0) th = -th;
    m.theta(j) = th;
    m.lambda(j) = std::exp(cplx(0, 1) * th);
    m.numerov_a(j) = a;
  }
  return m;
}

LeftIncidence propagate_from_left(const std::vector<MatrixXcd>& U, const AsymptoticModes& modes,
                                  const std::vector<std::size_t>& open) {
  const std::size_t last = U.size() - 1;
  const auto n = modes.lambda.size();
  const auto n_open = static_cast<Index>(open.size());

  // Backward ratios G_m = F_m F_{m+1}^{-1} of the solutions that are outgoing
  // (or decaying) to the right.
  std::vector<MatrixXcd> ginv(last);
  MatrixXcd g = modes.lambda.cwiseInverse().asDiagonal();
  for (std::size_t m = last - 1; m >= 1; --m) {
    ginv[m] = g.inverse();
    g = U[m] - ginv[m];
  }
  ginv[0] = g.inverse();

  MatrixXcd incident = MatrixXcd::Zero(n, n_open);
  for (Index c = 0; c < n_open; ++c) incident(static_cast<Index>(open[static_cast<std::size_t>(c)]), c) = 1.0;

  const MatrixXcd a = modes.numerov_a.asDiagonal();
  const MatrixXcd lam = modes.lambda.asDiagonal();
  const MatrixXcd lam_inv = modes.lambda.cwiseInverse().asDiagonal();
  const MatrixXcd lhs = a - g * a * lam_inv;
  const MatrixXcd rhs = (g * a * lam - a) * incident;
  Eigen::ColPivHouseholderQR<MatrixXcd> qr(lhs);
  if (!qr.isInvertible()) throw Error(ErrorCode::SingularLinearSystem, "left matching system is singular");
  const MatrixXcd reflected = qr.solve(rhs);

  MatrixXcd f = a * (incident + reflected);
  for (std::size_t m = 0; m < last; ++m) f = ginv[m] * f;
  return {modes.numerov_a.cwiseInverse().asDiagonal() * f, reflected};
}

}  // namespace

ScatterSolution solve_local(const LocalPotentialModel& model, double E) {
  model.validate();
  ScatterSolution sol;
  sol.kinematics = kinematics(model.channels, E);
  const auto open = sol.kinematics.open_indices();
  const double h = model.grid.spacing();
  const std::size_t npts = model.grid.size();

  double kmax = 0.0;
  for (auto j : open) kmax = std::max(kmax, sol.kinematics.k[j].real());
  sol.diagnostics.min_points_per_wavelength = 2.0 * std::numbers::pi / (kmax * h);
  sol.diagnostics.resolution_warning = sol.diagnostics.min_points_per_wavelength < kMinPointsPerWavelength;

  const AsymptoticModes modes = asymptotic_modes(model.channels, E, h);
  for (auto j : open) {
    const auto jj = static_cast<Index>(j);
    if (modes.theta(jj).imag() > 1e-12 || modes.theta(jj).real() >= std::numbers::pi * 0.999)
      throw Error(ErrorCode::ResolutionInsufficient, "grid too coarse to represent an open channel");
  }

  std::vector<MatrixXcd> U(npts);
  for (std::size_t i = 0; i < npts; ++i) U[i] = numerov_u(wave_matrix(model.V[i], model.channels, E), h);
  const LeftIncidence left = propagate_from_left(U, modes, open);
  std::vector<MatrixXcd> U_mirror(U.rbegin(), U.rend());
  const LeftIncidence right = propagate_from_left(U_mirror, modes, open);

  const auto n_open = static_cast<Index>(open.size());
  // discrete flux of a unit mode: |a|^2 sin(theta)
  Eigen::VectorXd flux_norm(n_open);
  Eigen::VectorXcd kd(n_open);
  for (Index c = 0; c < n_open; ++c) {
    const auto j = static_cast<Index>(open[static_cast<std::size_t>(c)]);
    flux_norm(c) = std::abs(modes.numerov_a(j)) * std::sqrt(std::sin(modes.theta(j).real()));
    kd(c) = modes.theta(j).real() / h;
  }

  // Convert node-referenced coefficients to plane waves exp(+-i k x) in the
  // absolute coordinate; the mirrored problem lives on x' = -x.
  auto to_blocks = [&](const LeftIncidence& li, double x_first, double x_last, MatrixXcd& t, MatrixXcd& r) {
    t.resize(n_open, n_open);
    r.resize(n_open, n_open);
    const cplx I(0, 1);
    for (Index ci = 0; ci < n_open; ++ci) {
      const cplx incident = std::exp(-I * kd(ci) * x_first);
      for (Index co = 0; co < n_open; ++co) {
        const auto jo = static_cast<Index>(open[static_cast<std::size_t>(co)]);
        const double scale = flux_norm(co) / flux_norm(ci);
        t(co, ci) = li.transmitted(jo, ci) * std::exp(-I * kd(co) * x_last) / incident * scale;
        r(co, ci) = li.reflected(jo, ci) * std::exp(I * kd(co) * x_first) / incident * scale;
      }
    }
  };
  MatrixXcd T, R, Tt, Rt;
  to_blocks(left, model.grid.x_min(), model.grid.x_max(), T, R);
  to_blocks(right, -model.grid.x_max(), -model.grid.x_min(), Tt, Rt);
  sol.S = SMatrix(T, R, Tt, Rt);
  sol.diagnostics.unitarity_defect = unitarity_defect(sol.S);
  (void)npts;
  return sol;
}

std::vector<ScatterSolution> convergence_sweep(const LocalPotentialModel& model, double E,
                                               const std::vector<std::size_t>& resolutions) {
  for (std::size_t i = 1; i < resolutions.size(); ++i)
    if (resolutions[i] <= resolutions[i - 1])
      throw Error(ErrorCode::PreconditionViolation, "resolutions must be strictly ascending");
  std::vector<ScatterSolution> out;
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    const Grid g(model.grid.x_min(), model.grid.x_max(), resolutions[i]);
    out.push_back(solve_local(resample(model, g), E));
    if (i > 0) {
      // Richardson estimate for a fourth-order scheme
      const double r = static_cast<double>(resolutions[i] - 1) / static_cast<double>(resolutions[i - 1] - 1);
      const double diff = (out[i].S.full() - out[i - 1].S.full()).cwiseAbs().maxCoeff();
      out[i].diagnostics.convergence_estimate = diff / (std::pow(r, 4) - 1.0);
    }
  }
  return out;
}

}  // namespace demonscatter
