#include "doctest.h"

#include <cmath>
#include <random>

#include "demonscatter/coupled_solver.hpp"
#include "demonscatter/demon.hpp"
#include "demonscatter/effective_kernel.hpp"
#include "demonscatter/errors.hpp"

using namespace demonscatter;
using Eigen::MatrixXcd;

namespace {

ChannelAmplitudes amps(double t, double r, double tt, double rt) {
  return amplitudes_from_probabilities({t, r, tt, rt});
}

}  // namespace

TEST_CASE("demon parameter") {
  CHECK(demon_parameter(amps(1, 0, 0, 1)) == doctest::Approx(1.0));
  CHECK(demon_parameter(amps(0.5, 0, 0, 0.5)) == doctest::Approx(0.5));
  CHECK(demon_parameter(amps(1, 0, 1, 0)) == doctest::Approx(0.0));
  CHECK(demon_parameter(Probabilities{0.3, 0.1, 0.2, 0.4}) == doctest::Approx(0.5 * (0.3 + 0.9 + 0.4 + 0.8) - 1));
}

TEST_CASE("D changes sign when the two sides swap") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 100; ++t) {
    const ChannelAmplitudes a{cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng))};
    const ChannelAmplitudes b{a.Tt, a.Rt, a.T, a.R};
    CHECK(demon_parameter(a) == doctest::Approx(-demon_parameter(b)).epsilon(1e-14));
  }
}

TEST_CASE("bound slacks") {
  const auto ideal = check_bounds(amps(1, 0, 0, 1), 1e-12);
  CHECK(ideal.slack[2] == doctest::Approx(-1.0));
  CHECK(ideal.violated);

  const auto half = check_bounds(amps(0.5, 0, 0, 0.5), 1e-12);
  CHECK_FALSE(half.violated);
  CHECK(half.slack[2] == doctest::Approx(0.0));
  for (double s : half.slack) CHECK(s >= -1e-15);

  const auto free_ = check_bounds(amps(1, 0, 1, 0), 1e-12);
  for (double s : free_.slack) CHECK(s == doctest::Approx(0.0));
  CHECK(free_.min() == doctest::Approx(0.0));
}

TEST_CASE("boundary classification") {
  const auto up = classify_boundary(amps(0.5, 0, 0, 0.5), 1e-9);
  CHECK(up.boundary == Boundary::Upper);
  CHECK(up.structure_holds);
  const auto down = classify_boundary(amps(0, 0.5, 0.5, 0), 1e-9);
  CHECK(down.boundary == Boundary::Lower);
  CHECK(down.structure_holds);
  const auto inside = classify_boundary(amps(0.7, 0.1, 0.6, 0.2), 1e-9);
  CHECK(inside.boundary == Boundary::None);
  try {
    classify_boundary(amps(0.9, 0, 0, 0.9), 1e-9);
    FAIL("expected inconsistent-boundary");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InconsistentBoundary);
  }
}

TEST_CASE("device codes") {
  CHECK(device_code(amps(0.5, 0, 0, 0.5)) == "½T/½R");
  CHECK(device_code(amps(1, 0, 0, 0)) == "T/A");
  CHECK(device_code(amps(0.5, 0.5, 0, 0)) == "½T½R/A");
  CHECK(device_code(amps(0, 0, 0, 1)) == "A/R");
  CHECK(device_code(amps(1, 0, 1, 0)) == "T/T");
}

TEST_CASE("D = 0 bounds") {
  const auto g = dzero_bounds(1, 0);
  CHECK(g.lower == 1.0);
  CHECK(g.upper == 1.0);
  const auto r = dzero_bounds(0, 1);
  CHECK(r.lower == 0.0);
  CHECK(r.upper == 0.0);
  const auto p = dzero_bounds(0.5, 0);
  CHECK(p.lower == 0.0);
  CHECK(p.upper == 0.5);
  CHECK(p.lower <= 0.0);
  try {
    dzero_bounds(0.6, 0.6);
    FAIL("expected infeasible-pair");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasiblePair);
  }
}

TEST_CASE("D = 0 regions tile the triangle") {
  // A: lower 0, upper 1-rt2; B: lower 0, upper t2+rt2; C: lower 2t2+rt2-1,
  // upper 1-rt2; D: lower 2t2+rt2-1, upper t2+rt2
  CHECK(dzero_bounds(0.1, 0.7).region == DZeroRegion::A);
  CHECK(dzero_bounds(0.1, 0.1).region == DZeroRegion::B);
  CHECK(dzero_bounds(0.8, 0.0).region == DZeroRegion::C);
  CHECK(dzero_bounds(0.6, 0.35).region == DZeroRegion::D);
  for (double t2 = 0; t2 <= 1.0; t2 += 0.05)
    for (double rt2 = 0; rt2 <= 1.0 - t2 + 1e-12; rt2 += 0.05) {
      const auto b = dzero_bounds(t2, std::min(rt2, 1.0 - t2));
      CHECK(b.lower <= b.upper + 1e-12);
    }
}

TEST_CASE("D = 0 devices from symmetric unitaries fall inside the bounds") {
  std::mt19937_64 rng(15);
  for (std::size_t n : {1u, 2u, 3u})
    for (int t = 0; t < 300; ++t) {
      const MatrixXcd U1 = haar_unitary(n, rng), U2 = haar_unitary(n, rng);
      const MatrixXcd A = 0.5 * (U1 + U2), B = 0.5 * (U1 - U2);
      const SMatrix S(A, B, A, B);
      CHECK(unitarity_defect(S) < 1e-12);
      const auto a = extract_channel(S, 0);
      const Probabilities p = probabilities(a);
      CHECK(std::abs(demon_parameter(a)) < 1e-12);
      const auto b = dzero_bounds(p.T, std::min(p.Rt, 1.0 - p.T));
      CHECK(p.Tt >= b.lower - 1e-10);
      CHECK(p.Tt <= b.upper + 1e-10);
    }
}

TEST_CASE("boundary S-matrices") {
  struct Case {
    BoundaryDevice kind;
    Probabilities p;
    double D;
  };
  for (const auto& c : {Case{BoundaryDevice::HalfDemon, {0.5, 0, 0, 0.5}, 0.5},
                        Case{BoundaryDevice::TransmitFilter, {1, 0, 0, 0}, 0.5},
                        Case{BoundaryDevice::ReflectFilter, {0, 0, 0, 1}, 0.5},
                        Case{BoundaryDevice::MirrorHalfDemon, {0, 0.5, 0.5, 0}, -0.5}}) {
    const SMatrix S = construct_boundary_smatrix(c.kind);
    CHECK(unitarity_defect(S) < 1e-12);
    const auto a = extract_channel(S, 0);
    const Probabilities p = probabilities(a);
    CHECK(std::abs(p.T - c.p.T) < 1e-12);
    CHECK(std::abs(p.R - c.p.R) < 1e-12);
    CHECK(std::abs(p.Tt - c.p.Tt) < 1e-12);
    CHECK(std::abs(p.Rt - c.p.Rt) < 1e-12);
    CHECK(std::abs(demon_parameter(a) - c.D) < 1e-12);
    CHECK(boundary_device_from_string(to_string(c.kind)) == c.kind);
  }
  const auto half = extract_channel(construct_boundary_smatrix(BoundaryDevice::HalfDemon), 0);
  CHECK(device_code(half) == "½T/½R");
}

TEST_CASE("free particle sweep") {
  const auto m = sample_model(default_grid(), ChannelSet{{0.0}, {}, {}},
                              [](double) { return MatrixXcd::Zero(1, 1).eval(); }, true);
  std::vector<double> v;
  for (int i = 1; i <= 10; ++i) v.push_back(i);
  const auto rows = sweep_demon(m, v);
  REQUIRE(rows.size() == 10);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].velocity == v[i]);
    CHECK(std::abs(rows[i].D) < 1e-10);
    CHECK(rows[i].code == "T/T");
  }
}

TEST_CASE("reference model sweep peaks at the design velocity") {
  const auto m = build_two_level_model(reference_profile(), kReferenceDetuning, 0.0, default_grid());
  const auto rows = sweep_demon(m, {6.0, 8.0, 10.0});
  CHECK(rows[1].D > rows[0].D);
  CHECK(rows[1].D > rows[2].D);
  CHECK(std::abs(rows[1].D - 0.5) <= 0.02);

  const auto k = build_kernel(OpticalParameters{reference_profile(), kReferenceDetuning, 0.0, 32.0}, default_grid());
  const auto nl = sweep_demon(k, {6.0, 8.0, 10.0});
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(nl[i].D - rows[i].D) < 1e-4);
}

TEST_CASE("reports carry slacks and the boundary flag") {
  const auto r = make_report(amps(0.5, 0, 0, 0.5), 8.0);
  CHECK(r.boundary == Boundary::Upper);
  CHECK(r.D == doctest::Approx(0.5));
  CHECK_FALSE(r.slacks.violated);
  const auto f = make_report(amps(1, 0, 1, 0), 1.0);
  CHECK(f.boundary == Boundary::None);
}
