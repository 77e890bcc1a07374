#include "demonscatter/nonlocal_solver.hpp"

#include <cmath>
#include <numbers>

#include "demonscatter/coupled_solver.hpp"
#include "demonscatter/errors.hpp"

namespace demonscatter {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

NonlocalKernel local_kernel(const Grid& grid, const std::function<cplx(double)>& potential) {
  NonlocalKernel k{grid, MatrixXcd::Zero(static_cast<Index>(grid.size()), static_cast<Index>(grid.size())), {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ii = static_cast<Index>(i);
    k.K(ii, ii) = potential(grid.x(i)) / grid.weight(i);
  }
  return k;
}

namespace {

// Applies the outgoing Green's function G(x, x') = exp(ik|x - x'|)/(ik)
// with quadrature weights to every column of `m`, in O(n) per column using
// the semi-separable structure of G.
MatrixXcd apply_green(const MatrixXcd& m, const VectorXcd& e_plus, const VectorXcd& e_minus,
                      const Eigen::VectorXd& w, double k) {
  const Index n = m.rows();
  MatrixXcd out(n, m.cols());
  const cplx inv_ik = 1.0 / cplx(0.0, k);
  VectorXcd suffix(n + 1);
  for (Index c = 0; c < m.cols(); ++c) {
    suffix(n) = 0.0;
    for (Index j = n - 1; j >= 0; --j) suffix(j) = suffix(j + 1) + w(j) * e_plus(j) * m(j, c);
    cplx prefix = 0.0;
    for (Index i = 0; i < n; ++i) {
      prefix += w(i) * e_minus(i) * m(i, c);
      out(i, c) = inv_ik * (e_plus(i) * prefix + e_minus(i) * suffix(i + 1));
    }
  }
  return out;
}

}  // namespace

ChannelAmplitudes solve_nonlocal(const NonlocalKernel& kernel, double k) {
  const Grid& grid = kernel.grid;
  const auto n = static_cast<Index>(grid.size());
  if (kernel.K.rows() != n || kernel.K.cols() != n)
    throw Error(ErrorCode::ShapeMismatch, "kernel matrix must match the grid");
  if (!(k > 0) || !std::isfinite(k)) throw Error(ErrorCode::InvalidRange, "wavenumber must be positive");
  if (2.0 * std::numbers::pi / (k * grid.spacing()) < kMinPointsPerWavelength)
    throw Error(ErrorCode::ResolutionInsufficient, "fewer than 20 grid points per wavelength");

  // Only nodes touched by a nonzero kernel entry enter the linear system; the
  // wave outside is fixed by the free solution.
  Index lo = n, hi = -1;
  for (Index i = 0; i < n; ++i) {
    if (kernel.K.row(i).cwiseAbs().maxCoeff() > 0.0 || kernel.K.col(i).cwiseAbs().maxCoeff() > 0.0) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  }
  if (hi < 0) return {1.0, 0.0, 1.0, 0.0};
  const Index m = hi - lo + 1;

  const cplx I(0, 1);
  VectorXcd e_plus(m), e_minus(m);
  Eigen::VectorXd w(m);
  for (Index i = 0; i < m; ++i) {
    const double x = grid.x(static_cast<std::size_t>(lo + i));
    e_plus(i) = std::exp(I * k * x);
    e_minus(i) = std::exp(-I * k * x);
    w(i) = grid.weight(static_cast<std::size_t>(lo + i));
  }
  const MatrixXcd kw = kernel.K.block(lo, lo, m, m) * w.asDiagonal();
  MatrixXcd a = -apply_green(kw, e_plus, e_minus, w, k);
  a.diagonal().array() += 1.0;

  Eigen::PartialPivLU<MatrixXcd> lu(a);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorCode::SingularLinearSystem, "Nystrom system is numerically singular");
  MatrixXcd rhs(m, 2);
  rhs.col(0) = e_plus;
  rhs.col(1) = e_minus;
  const MatrixXcd psi = lu.solve(rhs);
  if (!psi.allFinite()) throw Error(ErrorCode::SingularLinearSystem, "non-finite Nystrom solution");
  const MatrixXcd chi = kw * psi;

  // Far from the kernel: psi = phi + (1/ik) e^{+-ikx} sum_j w_j e^{-+ikx_j} chi_j
  const cplx inv_ik = 1.0 / cplx(0.0, k);
  auto project = [&](const VectorXcd& phase, Index col) {
    return inv_ik * (w.cwiseProduct(phase).transpose() * chi.col(col))(0);
  };
  ChannelAmplitudes amp;
  amp.T = 1.0 + project(e_minus, 0);
  amp.R = project(e_plus, 0);
  amp.Tt = 1.0 + project(e_plus, 1);
  amp.Rt = project(e_minus, 1);
  return amp;
}

ChannelAmplitudes solve_nonlocal_extrapolated(const std::function<NonlocalKernel(const Grid&)>& factory,
                                              const Grid& fine, double k) {
  if ((fine.size() - 1) % 2 != 0)
    throw Error(ErrorCode::PreconditionViolation, "fine grid needs an even number of intervals");
  const Grid coarse(fine.x_min(), fine.x_max(), (fine.size() - 1) / 2 + 1);
  const ChannelAmplitudes af = solve_nonlocal(factory(fine), k);
  const ChannelAmplitudes ac = solve_nonlocal(factory(coarse), k);
  auto rich = [](cplx f, cplx c) { return (4.0 * f - c) / 3.0; };
  return {rich(af.T, ac.T), rich(af.R, ac.R), rich(af.Tt, ac.Tt), rich(af.Rt, ac.Rt)};
}

MatrixXcd flip_arguments(const MatrixXcd& K) { return K.reverse(); }

KernelResiduals symmetrize_checks(const NonlocalKernel& kernel) {
  const MatrixXcd& K = kernel.K;
  KernelResiduals r;
  r.max_abs = K.size() ? K.cwiseAbs().maxCoeff() : 0.0;
  r.transpose = (K - K.transpose()).cwiseAbs().maxCoeff();
  r.hermitian = (K - K.adjoint()).cwiseAbs().maxCoeff();
  r.conjugate = (K - K.conjugate()).cwiseAbs().maxCoeff();
  if (kernel.grid.symmetric_about_origin()) {
    const MatrixXcd P = flip_arguments(K);
    r.parity = (K - P).cwiseAbs().maxCoeff();
    r.parity_pseudohermitian = (K - P.adjoint()).cwiseAbs().maxCoeff();
    r.pt = (K - P.conjugate()).cwiseAbs().maxCoeff();
    r.pt_pseudohermitian = (K - P.transpose()).cwiseAbs().maxCoeff();
  }
  return r;
}

}  // namespace demonscatter
