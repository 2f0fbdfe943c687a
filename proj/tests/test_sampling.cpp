#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "sobrec/geometry.hpp"
#include "sobrec/sampling.hpp"

using namespace sobrec;

TEST_CASE("iid sampling basics") {
  const Domain ball = Domain::ball(2);
  const PointSet empty = sample_iid_uniform(ball, 0, 1, 0);
  CHECK(empty.size() == 0);

  const PointSet P = sample_iid_uniform(ball, 500, 9, 0);
  CHECK(P.size() == 500);
  for (std::size_t j = 0; j < P.size(); ++j) CHECK(ball.contains(P.point(j)));
  CHECK(P.generator_id == "iid-uniform");
  CHECK(P.domain_id == "ball-d2");
  CHECK(P.seed == 9);
}

TEST_CASE("bit-identical regeneration") {
  for (const auto& dom : {Domain::unit_cube(1), Domain::unit_cube(2), Domain::ball(3),
                          Domain::l_shape_2d()}) {
    const PointSet a = sample_iid_uniform(dom, 257, 123456789, 7);
    const PointSet b = sample_iid_uniform(dom, 257, 123456789, 7);
    CHECK(a.coords == b.coords);
    const PointSet c = sample_iid_uniform(dom, 257, 123456790, 7);
    CHECK(a.coords != c.coords);
    const PointSet d = sample_iid_uniform(dom, 257, 123456789, 8);
    CHECK(a.coords != d.coords);
  }
}

TEST_CASE("per-coordinate mean within the 4-sigma CLT band") {
  // uniform variance 1/12: band 4 / sqrt(12 * 1e4)
  const Domain cube = Domain::unit_cube(2);
  const PointSet P = sample_iid_uniform(cube, 10000, 31337, 0);
  const double band = 4.0 / std::sqrt(12.0 * 10000.0);
  for (int k = 0; k < 2; ++k) {
    double mean = 0.0;
    for (std::size_t j = 0; j < P.size(); ++j) mean += P.point(j)[static_cast<std::size_t>(k)];
    mean /= static_cast<double>(P.size());
    CHECK(std::abs(mean - 0.5) < band);
  }
}

TEST_CASE("chi-square uniformity at fixed seeds") {
  // 4 bins in d = 1, critical value = chi^2(3 df) at 0.999
  const Domain line = Domain::unit_cube(1);
  for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const PointSet P = sample_iid_uniform(line, 10000, seed, 0);
    int bins[4] = {0, 0, 0, 0};
    for (std::size_t j = 0; j < P.size(); ++j)
      ++bins[std::min(3, static_cast<int>(P.point(j)[0] * 4.0))];
    double chi2 = 0.0;
    for (const int b : bins) chi2 += (b - 2500.0) * (b - 2500.0) / 2500.0;
    CHECK(chi2 < 16.26623619623813);
  }
}

TEST_CASE("rejection cap on a pathological bounding box") {
  Domain weird = Domain::ball(2);
  weird.box_lo = {-10000.0, -10000.0};  // volume fraction ~ 8e-9
  weird.box_hi = {10000.0, 10000.0};
  CHECK_THROWS_AS(static_cast<void>(sample_iid_uniform(weird, 4, 5, 0)), std::runtime_error);
}

TEST_CASE("quasi-uniform midpoint grid in d = 1") {
  const Domain line = Domain::unit_cube(1);
  const PointSet P = quasi_uniform_points(line, 4);
  REQUIRE(P.size() == 4);
  CHECK(P.coords[0] == doctest::Approx(1.0 / 8).epsilon(1e-15));
  CHECK(P.coords[1] == doctest::Approx(3.0 / 8).epsilon(1e-15));
  CHECK(P.coords[2] == doctest::Approx(5.0 / 8).epsilon(1e-15));
  CHECK(P.coords[3] == doctest::Approx(7.0 / 8).epsilon(1e-15));
  CHECK(P.generator_id == "quasi-uniform");
  CHECK_THROWS(quasi_uniform_points(line, 0));
}

TEST_CASE("quasi-uniform covering radius on the square") {
  const Domain square = Domain::unit_cube(2);
  for (const std::size_t k : {4ULL, 8ULL, 16ULL}) {
    const PointSet P = quasi_uniform_points(square, k * k);
    const double expected = std::sqrt(2.0) / (2.0 * static_cast<double>(k));
    const double h = covering_radius(P, square, 129);
    CHECK(h == doctest::Approx(expected).epsilon(0.2));  // probe-grid tolerance
  }
}

TEST_CASE("quasi-uniform points on the L-shape") {
  const Domain lshape = Domain::l_shape_2d();
  const PointSet P = quasi_uniform_points(lshape, 100);
  REQUIRE(P.size() == 100);
  for (std::size_t j = 0; j < P.size(); ++j) CHECK(lshape.contains(P.point(j)));
  const double h = covering_radius(P, lshape, 128);
  CHECK(h <= 3.0 * std::sqrt(0.75) / std::sqrt(100.0));
}

TEST_CASE("covering radius shrinks with n for iid samples") {
  for (const auto& dom : {Domain::unit_cube(1), Domain::unit_cube(2), Domain::ball(2),
                          Domain::l_shape_2d()}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const PointSet small = sample_iid_uniform(dom, 1 << 8, seed, 0);
      const PointSet large = sample_iid_uniform(dom, 1 << 12, seed, 0);
      const int res = dom.dim == 1 ? 512 : 96;
      CHECK(covering_radius(large, dom, res) < covering_radius(small, dom, res));
    }
  }
}

TEST_CASE("point set CSV round trip") {
  const Domain square = Domain::unit_cube(2);
  const PointSet P = sample_iid_uniform(square, 37, 5150, 0);
  std::stringstream ss;
  P.to_csv(ss);
  const PointSet Q = PointSet::from_csv(ss, 2);
  REQUIRE(Q.size() == P.size());
  CHECK(Q.coords == P.coords);  // 17 significant digits round-trip exactly
}
