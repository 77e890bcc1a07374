#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "demonscatter/units_grid.hpp"

namespace demonscatter {

/// Internal states of the scatterer. A channel's asymptotic energy is
/// threshold - i*width/2; channels with a nonzero width never carry flux.
struct ChannelSet {
  std::vector<double> thresholds;
  std::vector<double> widths;  // empty means all zero
  std::vector<std::string> labels;

  std::size_t size() const { return thresholds.size(); }
  double width(std::size_t j) const { return widths.empty() ? 0.0 : widths[j]; }
  cplx asymptotic_energy(std::size_t j) const { return {thresholds[j], -0.5 * width(j)}; }
  void validate() const;
};

struct ChannelKinematics {
  double energy = 0.0;
  std::vector<cplx> k;  // Im k >= 0
  std::vector<bool> open;

  std::vector<std::size_t> open_indices() const;
  std::size_t n_open() const;
};

ChannelKinematics kinematics(const ChannelSet& channels, double E);

/// Flux-normalized scattering matrix over the open channels,
///   S = [[T, Rt], [R, Tt]],
/// columns are incoming (left-incident channels, then right-incident),
/// rows are outgoing (right-moving channels, then left-moving).
class SMatrix {
 public:
  SMatrix() = default;
  explicit SMatrix(Eigen::MatrixXcd full);
  SMatrix(const Eigen::MatrixXcd& T, const Eigen::MatrixXcd& R, const Eigen::MatrixXcd& Tt,
          const Eigen::MatrixXcd& Rt);

  std::size_t n_open() const { return n_; }
  const Eigen::MatrixXcd& full() const { return s_; }

  Eigen::MatrixXcd T() const { return s_.topLeftCorner(n_, n_); }
  Eigen::MatrixXcd Rt() const { return s_.topRightCorner(n_, n_); }
  Eigen::MatrixXcd R() const { return s_.bottomLeftCorner(n_, n_); }
  Eigen::MatrixXcd Tt() const { return s_.bottomRightCorner(n_, n_); }

 private:
  Eigen::MatrixXcd s_;
  std::size_t n_ = 0;
};

struct ChannelAmplitudes {
  cplx T, R, Tt, Rt;
};

struct Probabilities {
  double T = 0, R = 0, Tt = 0, Rt = 0;
};

Probabilities probabilities(const ChannelAmplitudes& a);
ChannelAmplitudes amplitudes_from_probabilities(const Probabilities& p);

/// max(|S^dagger S - 1|_max, |S S^dagger - 1|_max)
double unitarity_defect(const SMatrix& S);

/// The four flux sums of channel i, in order: left-incidence column,
/// right-incidence column, right-moving outgoing row, left-moving outgoing row.
struct FluxSums {
  double left_incidence, right_incidence, right_outgoing, left_outgoing;
};
FluxSums channel_row_column_sums(const SMatrix& S, std::size_t i);

ChannelAmplitudes extract_channel(const SMatrix& S, std::size_t i0);

/// Haar-distributed unitary (QR of a complex Ginibre matrix, phases fixed by
/// the diagonal of R).
Eigen::MatrixXcd haar_unitary(std::size_t n, std::mt19937_64& rng);

}  // namespace demonscatter
