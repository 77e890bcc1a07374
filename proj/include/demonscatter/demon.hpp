#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "demonscatter/channels.hpp"
#include "demonscatter/coupled_solver.hpp"
#include "demonscatter/nonlocal_solver.hpp"

namespace demonscatter {

/// D = 1/2 [|T|^2 + (1 - |R|^2) + |Rt|^2 + (1 - |Tt|^2)] - 1, unclamped.
/// D = +1 is the ideal left-transmitting demon; unitarity confines D to
/// [-1/2, 1/2].
double demon_parameter(const ChannelAmplitudes& a);
double demon_parameter(const Probabilities& p);

/// Slacks of the single-channel flux inequalities, in order
/// 1-(|T|^2+|R|^2), 1-(|Tt|^2+|Rt|^2), 1-(|T|^2+|Rt|^2), 1-(|Tt|^2+|R|^2).
struct BoundSlacks {
  std::array<double, 4> slack{};
  bool violated = false;
  double min() const;
};
BoundSlacks check_bounds(const ChannelAmplitudes& a, double tol);

enum class Boundary { None, Upper, Lower };

struct BoundaryClassification {
  Boundary boundary = Boundary::None;
  double D = 0;
  bool structure_holds = true;
};

/// At D = +1/2 unitarity forces |Tt| = |R| = 0 and |T|^2 + |Rt|^2 = 1 (mirror
/// statement at -1/2). Throws inconsistent-boundary when D lies outside
/// [-1/2, 1/2] by more than tol or a boundary point lacks that structure.
BoundaryClassification classify_boundary(const ChannelAmplitudes& a, double tol);

inline constexpr double kDeviceCodeTolerance = 0.02;

/// Two-sided letter code "left/right": T full transmission, R full
/// reflection, A neither (flux leaves the channel). Partial responses carry a
/// fraction prefix, e.g. "½T/½R".
std::string device_code(const ChannelAmplitudes& a, double tol = kDeviceCodeTolerance);

enum class DZeroRegion { A, B, C, D };
char to_char(DZeroRegion r);

struct DZeroBounds {
  double lower = 0;
  double upper = 0;
  DZeroRegion region = DZeroRegion::A;
};

/// Allowed |Tt|^2 interval for a D = 0 device with given |T|^2 and |Rt|^2.
DZeroBounds dzero_bounds(double t2, double rt2);

enum class BoundaryDevice { HalfDemon, TransmitFilter, ReflectFilter, MirrorHalfDemon };
std::string_view to_string(BoundaryDevice kind);
BoundaryDevice boundary_device_from_string(std::string_view name);

/// Explicit two-channel unitary S whose channel-0 amplitudes realize the device.
SMatrix construct_boundary_smatrix(BoundaryDevice kind);

struct DemonReport {
  double velocity = 0;
  Probabilities probabilities;
  double D = 0;
  BoundSlacks slacks;
  std::string code;
  Boundary boundary = Boundary::None;
};

DemonReport make_report(const ChannelAmplitudes& a, double velocity, double tol = kDeviceCodeTolerance);

/// One report per velocity (E = v^2/2, ground threshold 0), in input order.
std::vector<DemonReport> sweep_demon(const LocalPotentialModel& model, const std::vector<double>& velocities,
                                     std::size_t i0 = 0);
/// Kernels with a descriptor are rebuilt at every energy; others are reused.
std::vector<DemonReport> sweep_demon(const NonlocalKernel& kernel, const std::vector<double>& velocities);

}  // namespace demonscatter
