#include "demonscatter/demon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "demonscatter/errors.hpp"

namespace demonscatter {

double demon_parameter(const Probabilities& p) { return 0.5 * (p.T + (1.0 - p.R) + p.Rt + (1.0 - p.Tt)) - 1.0; }

double demon_parameter(const ChannelAmplitudes& a) { return demon_parameter(probabilities(a)); }

double BoundSlacks::min() const { return *std::min_element(slack.begin(), slack.end()); }

BoundSlacks check_bounds(const ChannelAmplitudes& a, double tol) {
  const Probabilities p = probabilities(a);
  BoundSlacks s;
  s.slack = {1.0 - (p.T + p.R), 1.0 - (p.Tt + p.Rt), 1.0 - (p.T + p.Rt), 1.0 - (p.Tt + p.R)};
  s.violated = s.min() < -tol;
  return s;
}

BoundaryClassification classify_boundary(const ChannelAmplitudes& a, double tol) {
  const Probabilities p = probabilities(a);
  BoundaryClassification c;
  c.D = demon_parameter(p);
  if (c.D > 0.5 + tol || c.D < -0.5 - tol) {
    throw Error(ErrorCode::InconsistentBoundary,
                "D = " + std::to_string(c.D) + " lies outside [-1/2, 1/2]; amplitudes cannot come from a unitary S");
  }
  // |D -/+ 1/2| <= tol bounds the two forbidden probabilities by 2 tol
  if (std::abs(c.D - 0.5) <= tol) {
    c.boundary = Boundary::Upper;
    c.structure_holds = p.Tt <= 2 * tol && p.R <= 2 * tol && std::abs(p.T + p.Rt - 1.0) <= 2 * tol;
  } else if (std::abs(c.D + 0.5) <= tol) {
    c.boundary = Boundary::Lower;
    c.structure_holds = p.T <= 2 * tol && p.Rt <= 2 * tol && std::abs(p.Tt + p.R - 1.0) <= 2 * tol;
  }
  if (!c.structure_holds)
    throw Error(ErrorCode::InconsistentBoundary, "D at the bound but the required amplitude structure is violated");
  return c;
}

namespace {

std::string fraction(double p, double tol) {
  struct Frac {
    double value;
    const char* glyph;
  };
  static constexpr Frac table[] = {{0.5, "½"}, {0.25, "¼"}, {0.75, "¾"}, {1.0 / 3.0, "⅓"}, {2.0 / 3.0, "⅔"}};
  for (const auto& f : table)
    if (std::abs(p - f.value) <= tol) return f.glyph;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", p);
  return buf;
}

std::string side_code(double transmit, double reflect, double tol) {
  std::string out;
  for (auto [prob, letter] : {std::pair{transmit, "T"}, std::pair{reflect, "R"}}) {
    if (prob <= tol) continue;
    if (prob < 1.0 - tol) out += fraction(prob, tol);
    out += letter;
  }
  return out.empty() ? "A" : out;
}

}  // namespace

std::string device_code(const ChannelAmplitudes& a, double tol) {
  const Probabilities p = probabilities(a);
  return side_code(p.T, p.R, tol) + "/" + side_code(p.Tt, p.Rt, tol);
}

char to_char(DZeroRegion r) { return static_cast<char>('A' + static_cast<int>(r)); }

DZeroBounds dzero_bounds(double t2, double rt2) {
  if (!(t2 >= 0 && t2 <= 1 && rt2 >= 0 && rt2 <= 1))
    throw Error(ErrorCode::InfeasiblePair, "probabilities must lie in [0, 1]");
  if (rt2 > 1.0 - t2 + 1e-12) throw Error(ErrorCode::InfeasiblePair, "|Rt|^2 > 1 - |T|^2");
  const double lower_c = 2.0 * t2 + rt2 - 1.0;
  const double upper_a = 1.0 - rt2;
  const double upper_b = t2 + rt2;
  DZeroBounds out;
  // boundary points go to the earlier region letter
  const bool lower_zero = lower_c <= 0.0;
  const bool upper_first = lower_zero ? upper_a <= upper_b : upper_b <= upper_a;
  out.lower = lower_zero ? 0.0 : lower_c;
  out.upper = std::min(upper_a, upper_b);
  if (lower_zero)
    out.region = upper_first ? DZeroRegion::A : DZeroRegion::B;
  else
    out.region = upper_first ? DZeroRegion::C : DZeroRegion::D;
  return out;
}

std::string_view to_string(BoundaryDevice kind) {
  switch (kind) {
    case BoundaryDevice::HalfDemon: return "half-demon";
    case BoundaryDevice::TransmitFilter: return "T/A";
    case BoundaryDevice::ReflectFilter: return "A/R";
    case BoundaryDevice::MirrorHalfDemon: return "R/T-half";
  }
  return "?";
}

BoundaryDevice boundary_device_from_string(std::string_view name) {
  for (auto k : {BoundaryDevice::HalfDemon, BoundaryDevice::TransmitFilter, BoundaryDevice::ReflectFilter,
                 BoundaryDevice::MirrorHalfDemon})
    if (to_string(k) == name) return k;
  throw Error(ErrorCode::Parse, "unknown boundary device '" + std::string(name) + "'");
}

SMatrix construct_boundary_smatrix(BoundaryDevice kind) {
  // rows: right-moving ch0, ch1, left-moving ch0, ch1
  // cols: incident from left ch0, ch1, from right ch0, ch1
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(4, 4);
  const double h = std::sqrt(0.5);
  switch (kind) {
    case BoundaryDevice::HalfDemon:
      s(0, 0) = h, s(0, 2) = h;
      s(1, 0) = h, s(1, 2) = -h;
      s(2, 1) = 1.0;
      s(3, 3) = 1.0;
      break;
    case BoundaryDevice::TransmitFilter:
      s(0, 0) = 1.0;
      s(1, 2) = 1.0;
      s(2, 1) = 1.0;
      s(3, 3) = 1.0;
      break;
    case BoundaryDevice::ReflectFilter:
      s(0, 2) = 1.0;
      s(1, 0) = 1.0;
      s(2, 1) = 1.0;
      s(3, 3) = 1.0;
      break;
    case BoundaryDevice::MirrorHalfDemon:
      s(2, 0) = h, s(2, 2) = h;
      s(3, 0) = h, s(3, 2) = -h;
      s(0, 1) = 1.0;
      s(1, 3) = 1.0;
      break;
  }
  return SMatrix(s);
}

DemonReport make_report(const ChannelAmplitudes& a, double velocity, double tol) {
  DemonReport r;
  r.velocity = velocity;
  r.probabilities = probabilities(a);
  r.D = demon_parameter(r.probabilities);
  r.slacks = check_bounds(a, tol);
  r.code = device_code(a, tol);
  if (std::abs(r.D - 0.5) <= tol)
    r.boundary = Boundary::Upper;
  else if (std::abs(r.D + 0.5) <= tol)
    r.boundary = Boundary::Lower;
  return r;
}

}  // namespace demonscatter
