#include "demonscatter/effective_kernel.hpp"

#include <cmath>

#include "demonscatter/errors.hpp"

namespace demonscatter {

using Eigen::Index;
using Eigen::MatrixXcd;

cplx compute_mu(double delta, double gamma, double E) {
  if (!(E > 0)) throw Error(ErrorCode::NonpositiveEnergy, "energy must be positive");
  return cplx(2.0 * delta, gamma) / (2.0 * E);
}

BranchedWavenumber compute_q(double E, cplx mu) {
  if (!(E > 0)) throw Error(ErrorCode::NonpositiveEnergy, "energy must be positive");
  const cplx one_plus_mu = 1.0 + mu;
  cplx root;
  if (one_plus_mu.imag() == 0.0) {
    // stay exactly on the real or imaginary axis
    const double re = one_plus_mu.real();
    root = re >= 0 ? cplx(std::sqrt(re), 0.0) : cplx(0.0, std::sqrt(-re));
  } else {
    root = std::sqrt(one_plus_mu);
  }
  cplx q = std::sqrt(2.0 * E) * root;
  if (q.imag() < 0) q = -q;
  return {q, mu};
}

NonlocalKernel build_kernel(const OpticalParameters& params, const Grid& grid) {
  if (params.gamma < 0) throw Error(ErrorCode::InvalidRange, "gamma must be >= 0");
  const cplx q = compute_q(params.energy, compute_mu(params.delta, params.gamma, params.energy)).q;
  if (q == cplx(0.0)) throw Error(ErrorCode::QZero, "q = 0: kernel singular at the effective threshold");
  const auto n = static_cast<Index>(grid.size());
  std::vector<cplx> om(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) om[i] = rabi_eval(params.profile, grid.x(i));
  const cplx pref = 1.0 / (4.0 * cplx(0, 1) * q);
  NonlocalKernel k{grid, MatrixXcd::Zero(n, n), params};
  for (Index j = 0; j < n; ++j) {
    const cplx oj = std::conj(om[static_cast<std::size_t>(j)]);
    if (oj == cplx(0.0)) continue;
    for (Index i = 0; i < n; ++i) {
      const cplx oi = om[static_cast<std::size_t>(i)];
      if (oi == cplx(0.0)) continue;
      const double dist = std::abs(grid.x(static_cast<std::size_t>(i)) - grid.x(static_cast<std::size_t>(j)));
      k.K(i, j) = pref * std::exp(cplx(0, 1) * q * dist) * oi * oj;
    }
  }
  return k;
}

NonlocalKernel regenerate(const NonlocalKernel& kernel, const Grid& grid) {
  if (!kernel.descriptor) throw Error(ErrorCode::PreconditionViolation, "kernel has no descriptor");
  return build_kernel(*kernel.descriptor, grid);
}

NonlocalKernel regenerate(const NonlocalKernel& kernel, double energy) {
  if (!kernel.descriptor) throw Error(ErrorCode::PreconditionViolation, "kernel has no descriptor");
  OpticalParameters p = *kernel.descriptor;
  p.energy = energy;
  return build_kernel(p, kernel.grid);
}

namespace {

// Exact propagation of (u, u') across a cell of constant potential.
void step(cplx& u, cplx& du, cplx kappa, double dx) {
  const cplx c = std::cos(kappa * dx);
  if (std::abs(kappa) < 1e-300) {
    u += du * dx;
    return;
  }
  const cplx s = std::sin(kappa * dx);
  const cplx u_new = u * c + du * s / kappa;
  du = -u * kappa * s + du * c;
  u = u_new;
}

cplx branch_sqrt(cplx z) {
  cplx r = std::sqrt(z);
  return r.imag() < 0 ? -r : r;
}

}  // namespace

NonlocalKernel feshbach_reference(const LocalPotentialModel& model, double E, std::size_t i0) {
  model.validate();
  if (model.n_channels() != 2) throw Error(ErrorCode::UnsupportedChannelCount, "Feshbach reference supports 2 channels");
  if (i0 > 1) throw Error(ErrorCode::IndexOutOfRange, "channel index out of range");
  const std::size_t jq = 1 - i0;
  const auto a = static_cast<Index>(i0);
  const auto b = static_cast<Index>(jq);
  const Grid& grid = model.grid;
  const std::size_t n = grid.size();
  const double h = grid.spacing();

  // kinetic energy available in the eliminated channel, E - eps + i width/2
  const cplx ekin = cplx(E, 0.0) - model.channels.asymptotic_energy(jq);
  const cplx q = branch_sqrt(2.0 * ekin);
  if (q == cplx(0.0)) throw Error(ErrorCode::QZero, "eliminated channel sits exactly at threshold");

  std::vector<cplx> kappa(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const cplx vmid = 0.5 * (model.V[i](b, b) + model.V[i + 1](b, b));
    kappa[i] = branch_sqrt(2.0 * (ekin - vmid));
  }
  // u_left ~ exp(-iqx) at the left end, u_right ~ exp(iqx) at the right end
  std::vector<cplx> ul(n), ur(n), dul(n), dur(n);
  const cplx I(0, 1);
  ul[0] = std::exp(-I * q * grid.x(0));
  dul[0] = -I * q * ul[0];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    ul[i + 1] = ul[i];
    dul[i + 1] = dul[i];
    step(ul[i + 1], dul[i + 1], kappa[i], h);
  }
  ur[n - 1] = std::exp(I * q * grid.x(n - 1));
  dur[n - 1] = I * q * ur[n - 1];
  for (std::size_t i = n - 1; i > 0; --i) {
    ur[i - 1] = ur[i];
    dur[i - 1] = dur[i];
    step(ur[i - 1], dur[i - 1], kappa[i - 1], -h);
  }
  const std::size_t mid = n / 2;
  const cplx wronskian = ul[mid] * dur[mid] - dul[mid] * ur[mid];
  // (1/2) d^2/dx^2 G + (E_kin - V) G = delta  =>  G = 2 u_<(x_<) u_>(x_>) / W
  const cplx norm = 2.0 / wronskian;

  NonlocalKernel out{grid, MatrixXcd::Zero(static_cast<Index>(n), static_cast<Index>(n)), {}};
  for (std::size_t j = 0; j < n; ++j) {
    const cplx vj = model.V[j](b, a);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vi = model.V[i](a, b);
      if (vi == cplx(0.0) || vj == cplx(0.0)) continue;
      const cplx g = i <= j ? norm * ul[i] * ur[j] : norm * ul[j] * ur[i];
      out.K(static_cast<Index>(i), static_cast<Index>(j)) = vi * g * vj;
    }
    out.K(static_cast<Index>(j), static_cast<Index>(j)) += model.V[j](a, a) / grid.weight(j);
  }
  return out;
}

}  // namespace demonscatter
