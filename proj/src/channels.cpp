#include "demonscatter/channels.hpp"

#include <algorithm>
#include <cmath>

#include "demonscatter/errors.hpp"

namespace demonscatter {

void ChannelSet::validate() const {
  if (thresholds.empty()) throw Error(ErrorCode::ShapeMismatch, "at least one channel is required");
  if (!widths.empty() && widths.size() != thresholds.size())
    throw Error(ErrorCode::ShapeMismatch, "widths must match thresholds");
  if (!labels.empty() && labels.size() != thresholds.size())
    throw Error(ErrorCode::ShapeMismatch, "labels must match thresholds");
  for (std::size_t j = 0; j < size(); ++j) {
    if (!std::isfinite(thresholds[j]) || !std::isfinite(width(j)))
      throw Error(ErrorCode::InvalidRange, "thresholds must be finite");
    if (width(j) < 0) throw Error(ErrorCode::InvalidRange, "channel widths must be >= 0");
  }
}

std::vector<std::size_t> ChannelKinematics::open_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < open.size(); ++j)
    if (open[j]) idx.push_back(j);
  return idx;
}

std::size_t ChannelKinematics::n_open() const {
  return static_cast<std::size_t>(std::count(open.begin(), open.end(), true));
}

ChannelKinematics kinematics(const ChannelSet& channels, double E) {
  channels.validate();
  if (!std::isfinite(E)) throw Error(ErrorCode::InvalidRange, "energy must be finite");
  ChannelKinematics kin;
  kin.energy = E;
  for (std::size_t j = 0; j < channels.size(); ++j) {
    const cplx kinetic = cplx(E, 0.0) - channels.asymptotic_energy(j);
    const bool open = channels.width(j) == 0.0 && kinetic.real() > 0.0;
    cplx k;
    if (channels.width(j) == 0.0) {
      // keep closed channels exactly imaginary
      k = kinetic.real() > 0 ? cplx(std::sqrt(2.0 * kinetic.real()), 0.0)
                             : cplx(0.0, std::sqrt(-2.0 * kinetic.real()));
    } else {
      k = std::sqrt(2.0 * kinetic);
      if (k.imag() < 0) k = -k;
    }
    kin.k.push_back(k);
    kin.open.push_back(open);
  }
  if (kin.n_open() == 0) throw Error(ErrorCode::AllChannelsClosed, "no open channel at this energy");
  return kin;
}

SMatrix::SMatrix(Eigen::MatrixXcd full) : s_(std::move(full)) {
  if (s_.rows() != s_.cols() || s_.rows() % 2 != 0 || s_.rows() == 0)
    throw Error(ErrorCode::ShapeMismatch, "S-matrix must be 2N x 2N");
  n_ = static_cast<std::size_t>(s_.rows() / 2);
}

SMatrix::SMatrix(const Eigen::MatrixXcd& T, const Eigen::MatrixXcd& R, const Eigen::MatrixXcd& Tt,
                 const Eigen::MatrixXcd& Rt) {
  const auto n = T.rows();
  for (const auto* b : {&T, &R, &Tt, &Rt})
    if (b->rows() != n || b->cols() != n) throw Error(ErrorCode::ShapeMismatch, "S-matrix blocks must be square and equal");
  if (n == 0) throw Error(ErrorCode::ShapeMismatch, "empty S-matrix");
  s_.resize(2 * n, 2 * n);
  s_ << T, Rt, R, Tt;
  n_ = static_cast<std::size_t>(n);
}

Probabilities probabilities(const ChannelAmplitudes& a) {
  return {std::norm(a.T), std::norm(a.R), std::norm(a.Tt), std::norm(a.Rt)};
}

ChannelAmplitudes amplitudes_from_probabilities(const Probabilities& p) {
  return {std::sqrt(p.T), std::sqrt(p.R), std::sqrt(p.Tt), std::sqrt(p.Rt)};
}

double unitarity_defect(const SMatrix& S) {
  const auto& s = S.full();
  const auto id = Eigen::MatrixXcd::Identity(s.rows(), s.cols());
  const double a = (s.adjoint() * s - id).cwiseAbs().maxCoeff();
  const double b = (s * s.adjoint() - id).cwiseAbs().maxCoeff();
  return std::max(a, b);
}

FluxSums channel_row_column_sums(const SMatrix& S, std::size_t i) {
  if (i >= S.n_open()) throw Error(ErrorCode::IndexOutOfRange, "channel index out of range");
  const auto& s = S.full();
  const auto n = static_cast<Eigen::Index>(S.n_open());
  const auto ii = static_cast<Eigen::Index>(i);
  // columns i and n+i hold left and right incidence; rows i and n+i the
  // right- and left-moving outgoing waves
  return {s.col(ii).squaredNorm(), s.col(n + ii).squaredNorm(), s.row(ii).squaredNorm(),
          s.row(n + ii).squaredNorm()};
}

ChannelAmplitudes extract_channel(const SMatrix& S, std::size_t i0) {
  if (i0 >= S.n_open()) throw Error(ErrorCode::IndexOutOfRange, "channel index out of range");
  const auto& s = S.full();
  const auto n = static_cast<Eigen::Index>(S.n_open());
  const auto i = static_cast<Eigen::Index>(i0);
  return {s(i, i), s(n + i, i), s(n + i, n + i), s(i, n + i)};
}

Eigen::MatrixXcd haar_unitary(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd z(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = cplx(re, im) / std::sqrt(2.0);
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(m, m);
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < m; ++j) {
    const cplx d = r(j, j);
    const double ad = std::abs(d);
    q.col(j) *= ad > 0 ? d / ad : cplx(1.0);
  }
  return q;
}

}  // namespace demonscatter
