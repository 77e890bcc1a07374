#include "doctest.h"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "demonscatter/errors.hpp"
#include "demonscatter/units_grid.hpp"

using namespace demonscatter;
using bf50 = boost::multiprecision::cpp_bin_float_50;

TEST_CASE("make_grid endpoints and spacing") {
  const Grid g = make_grid(-1.5, 1.5, 4);
  const std::vector<double> expect{-1.5, -0.5, 0.5, 1.5};
  for (std::size_t i = 0; i < 4; ++i) CHECK(g.x(i) == doctest::Approx(expect[i]).epsilon(1e-15));
  CHECK(make_grid(-1.5, 1.5, 2001).spacing() == doctest::Approx(0.0015).epsilon(1e-14));
  CHECK(g.x(0) == -1.5);
  CHECK(g.x(3) == 1.5);
}

TEST_CASE("make_grid rejects bad input") {
  try {
    make_grid(0, 0, 10);
    FAIL("expected invalid-range");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidRange);
  }
  try {
    make_grid(0, 1, 2);
    FAIL("expected too-few-points");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewPoints);
  }
}

TEST_CASE("grid round trip") {
  for (std::size_t n : {3u, 4u, 101u, 2001u}) {
    const Grid g = make_grid(-1.5, 1.5, n);
    for (std::size_t i = 0; i < n; ++i) CHECK(g.nearest_index(g.x(i)) == i);
  }
  CHECK(default_grid().symmetric_about_origin());
  CHECK_FALSE(make_grid(-1.0, 2.0, 11).symmetric_about_origin());
}

TEST_CASE("trapezoid weights sum to the box length") {
  const Grid g = make_grid(-1.5, 1.5, 301);
  double s = 0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weight(i);
  CHECK(s == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("rabi_eval single lobes") {
  const cplx a = rabi_eval(RabiProfile{0, 1, 0, 1}, 0.0);
  CHECK(a.real() == doctest::Approx(1.0));
  CHECK(a.imag() == doctest::Approx(0.0));
  const cplx b = rabi_eval(RabiProfile{1, 0, 0, 1}, 0.0);
  CHECK(b.real() == doctest::Approx(0.0));
  CHECK(b.imag() == doctest::Approx(-1.0));
}

TEST_CASE("rabi_eval at the reference point against 50-digit arithmetic") {
  const RabiProfile p = reference_profile();
  // both lobes sit at distance x0 from the origin
  const bf50 w = boost::multiprecision::sqrt(bf50(2)) / 10;
  const bf50 x0("0.16455");
  const bf50 g = boost::multiprecision::exp(-(x0 * x0) / (w * w));
  const bf50 b("165.874"), c("103.876");
  const bf50 oracle = g * boost::multiprecision::sqrt(b * b + c * c);
  const double got = std::abs(rabi_eval(p, 0.0));
  CHECK(std::abs(got - oracle.convert_to<double>()) / oracle.convert_to<double>() < 1e-12);
}

TEST_CASE("rabi profile decays outside the box") {
  const RabiProfile p = reference_profile();
  double peak = 0;
  for (double x = -0.5; x <= 0.5; x += 1e-4) peak = std::max(peak, std::abs(rabi_eval(p, x)));
  for (double x : {1.5, -1.5, 2.0, -3.0, 10.0}) CHECK(std::abs(rabi_eval(p, x)) / peak < 1e-40);
}

TEST_CASE("rabi_eval is linear in b and c") {
  const RabiProfile p1{1.3, -0.4, 0.2, 0.3}, p2{-2.0, 0.7, 0.2, 0.3};
  const RabiProfile sum{p1.b + 2 * p2.b, p1.c + 2 * p2.c, 0.2, 0.3};
  for (double x : {-0.4, -0.1, 0.0, 0.15, 0.5}) {
    const cplx lhs = rabi_eval(sum, x), rhs = rabi_eval(p1, x) + 2.0 * rabi_eval(p2, x);
    CHECK(std::abs(lhs - rhs) < 1e-14);
  }
}

TEST_CASE("velocity_to_energy") {
  CHECK(velocity_to_energy(8) == 32.0);
  CHECK(velocity_to_energy(0) == 0.0);
  CHECK(velocity_to_energy(1) == 0.5);
  try {
    velocity_to_energy(-1);
    FAIL("expected negative-velocity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeVelocity);
  }
}

TEST_CASE("reduced units") {
  const UnitSystem u;
  CHECK(u.v_d == 1.0);
  CHECK(u.tau == 1.0);
  CHECK(u.hbar * u.hbar / (u.m * u.d * u.d) == 1.0);
}
