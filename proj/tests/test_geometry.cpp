#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "sobrec/geometry.hpp"
#include "sobrec/rng.hpp"
#include "sobrec/sampling.hpp"

using namespace sobrec;

namespace {

// Independent brute-force oracle: regenerate the same inclusive probe grid and
// scan every probe against every point.
double covering_radius_oracle(const PointSet& P, const Domain& dom, int res) {
  const int d = dom.dim;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  double worst = 0.0;
  while (true) {
    for (int k = 0; k < d; ++k)
      x[static_cast<std::size_t>(k)] =
          dom.box_lo[static_cast<std::size_t>(k)] +
          (static_cast<double>(idx[static_cast<std::size_t>(k)]) / (res - 1)) *
              (dom.box_hi[static_cast<std::size_t>(k)] - dom.box_lo[static_cast<std::size_t>(k)]);
    if (dom.contains_closure(x)) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < P.size(); ++j) {
        const auto pj = P.point(j);
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
          const double t = x[static_cast<std::size_t>(k)] - pj[static_cast<std::size_t>(k)];
          s += t * t;
        }
        best = std::min(best, s);
      }
      worst = std::max(worst, best);
    }
    int k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] == static_cast<std::size_t>(res)) {
      idx[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == d) break;
  }
  return std::sqrt(worst);
}

std::vector<double> random_point_in(const Domain& dom, const RngStream& rng, std::uint64_t& ctr) {
  std::vector<double> x(static_cast<std::size_t>(dom.dim));
  do {
    for (int k = 0; k < dom.dim; ++k)
      x[static_cast<std::size_t>(k)] = dom.box_lo[static_cast<std::size_t>(k)] +
                                       rng.u01(ctr++) * (dom.box_hi[static_cast<std::size_t>(k)] -
                                                         dom.box_lo[static_cast<std::size_t>(k)]);
  } while (!dom.contains(x));
  return x;
}

}  // namespace

TEST_CASE("domain membership") {
  const Domain cube = Domain::unit_cube(2);
  CHECK(cube.contains(std::vector<double>{0.5, 0.5}));
  CHECK_FALSE(cube.contains(std::vector<double>{1.0, 0.5}));  // boundary of the open set
  CHECK(cube.contains_closure(std::vector<double>{1.0, 0.5}));

  const Domain lshape = Domain::l_shape_2d();
  CHECK_FALSE(lshape.contains(std::vector<double>{0.75, 0.75}));  // removed quadrant
  CHECK_FALSE(lshape.contains(std::vector<double>{0.5, 0.5}));    // quadrant is closed
  CHECK(lshape.contains(std::vector<double>{0.25, 0.75}));
  CHECK(lshape.contains(std::vector<double>{0.75, 0.25}));

  const Domain ball = Domain::ball(2);
  CHECK(ball.contains(std::vector<double>{0.5, 0.0}));
  CHECK_FALSE(ball.contains(std::vector<double>{1.0, 0.0}));
  CHECK_FALSE(cube.contains(std::vector<double>{std::nan(""), 0.5}));
  CHECK_THROWS(cube.contains(std::vector<double>{0.5}));  // dimension mismatch
}

TEST_CASE("domain metadata") {
  CHECK(Domain::unit_cube(1).volume == 1.0);
  CHECK(Domain::unit_cube(3).volume == 1.0);
  CHECK(Domain::ball(2).volume == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  CHECK(Domain::ball(3).volume == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-12));
  CHECK(Domain::l_shape_2d().volume == 0.75);
  for (const auto& dom : {Domain::unit_cube(2), Domain::ball(2), Domain::l_shape_2d()})
    CHECK(dom.cone_half_angle <= std::numbers::pi / 5.0 + 1e-15);
  CHECK_THROWS(Domain::unit_cube(1).with_cone_parameters(0.25, 1.0));  // theta > pi/5
  CHECK_THROWS(Domain::unit_cube(1).with_cone_parameters(-1.0, 0.5));
  CHECK_THROWS(Domain::by_name("torus", 2));
  CHECK_THROWS(Domain::by_name("lshape", 3));
}

TEST_CASE("cone_at directions") {
  const Domain cube = Domain::unit_cube(2);
  const Cone c1 = cube.cone_at(std::vector<double>{0.1, 0.5}, 0.2);
  CHECK(c1.direction[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c1.direction[1] == doctest::Approx(0.0).epsilon(1e-14));

  const Domain ball = Domain::ball(2);
  const Cone c2 = ball.cone_at(std::vector<double>{0.5, 0.0}, 0.2);
  CHECK(c2.direction[0] == doctest::Approx(-1.0).epsilon(1e-14));

  // apex exactly at the star center: declared tie-break
  const Cone c3 = cube.cone_at(std::vector<double>{0.5, 0.5}, 0.2);
  CHECK(c3.direction[0] == 1.0);
  CHECK(c3.direction[1] == 0.0);

  CHECK_THROWS(cube.cone_at(std::vector<double>{1.5, 0.5}, 0.2));   // x outside
  CHECK_THROWS(cube.cone_at(std::vector<double>{0.5, 0.5}, 0.26));  // rho > r
  CHECK_THROWS(cube.cone_at(std::vector<double>{0.5, 0.5}, 0.0));

  // unit direction invariant
  const RngStream rng = RngStream::from_seed(12);
  std::uint64_t ctr = 0;
  for (int t = 0; t < 100; ++t) {
    const auto x = random_point_in(cube, rng, ctr);
    const Cone c = cube.cone_at(x, 0.25);
    double n2 = 0.0;
    for (const double v : c.direction) n2 += v * v;
    CHECK(std::abs(std::sqrt(n2) - 1.0) < 1e-12);
  }
}

TEST_CASE("cone membership") {
  Cone cone;
  cone.apex = {0.0, 0.0};
  cone.direction = {1.0, 0.0};
  cone.half_angle = std::numbers::pi / 5.0;
  cone.radius = 1.0;
  CHECK(cone.contains(std::vector<double>{0.5, 0.0}));
  CHECK_FALSE(cone.contains(std::vector<double>{0.0, 0.5}));  // 90 degrees off axis
  CHECK_FALSE(cone.contains(std::vector<double>{1.1, 0.0}));  // beyond radius
  CHECK(cone.contains(std::vector<double>{0.0, 0.0}));        // apex

  // d = 1: the cone is the interval [x, x + rho*xi]
  Cone seg;
  seg.apex = {0.3};
  seg.direction = {-1.0};
  seg.half_angle = std::numbers::pi / 5.0;
  seg.radius = 0.2;
  CHECK(seg.contains(std::vector<double>{0.15}));
  CHECK_FALSE(seg.contains(std::vector<double>{0.35}));
  CHECK_FALSE(seg.contains(std::vector<double>{0.05}));
}

TEST_CASE("cone condition audit on built-in domains") {
  // for random x the cone produced by cone_at(x, r) lies inside the domain
  for (const auto& dom : {Domain::unit_cube(1), Domain::unit_cube(2), Domain::unit_cube(3),
                          Domain::ball(1), Domain::ball(2), Domain::ball(3), Domain::l_shape_2d()}) {
    const RngStream rng = RngStream::from_seed(500 + static_cast<std::uint64_t>(dom.dim));
    std::uint64_t ctr = 0;
    int violations = 0;
    for (int t = 0; t < 1000; ++t) {
      const auto x = random_point_in(dom, rng, ctr);
      const Cone cone = dom.cone_at(x, dom.cone_radius);
      std::vector<double> lo, hi, y(static_cast<std::size_t>(dom.dim));
      cone.bounding_box(lo, hi);
      for (int probe = 0; probe < 100; ++probe) {
        for (int k = 0; k < dom.dim; ++k)
          y[static_cast<std::size_t>(k)] =
              lo[static_cast<std::size_t>(k)] +
              rng.u01(ctr++) * (hi[static_cast<std::size_t>(k)] - lo[static_cast<std::size_t>(k)]);
        if (!cone.contains(y)) continue;
        if (!dom.contains_closure(y)) ++violations;
      }
    }
    CHECK_MESSAGE(violations == 0, dom.id());
  }
}

TEST_CASE("c_theta") {
  CHECK(c_theta(std::numbers::pi / 6.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // oracle: direct evaluation of sin t / (1 + sin t) at t = pi/5
  CHECK(c_theta(std::numbers::pi / 5.0) == doctest::Approx(0.37019190815875014).epsilon(1e-12));
  // decreasing toward 0 as theta -> 0+
  double prev = c_theta(0.5);
  for (const double t : {0.25, 0.1, 0.01, 1e-4}) {
    const double v = c_theta(t);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
  CHECK_THROWS(c_theta(0.0));
  CHECK_THROWS(c_theta(4.0));
}

TEST_CASE("default grid subdivision") {
  // ceil(8*sqrt(d) / (c_theta * c1))
  const double ct = c_theta(std::numbers::pi / 5.0);
  CHECK(default_grid_subdivision(1, std::numbers::pi / 5.0, 0.5) ==
        static_cast<int>(std::ceil(8.0 / (ct * 0.5))));
  CHECK(default_grid_subdivision(2, std::numbers::pi / 5.0, 1.0) ==
        static_cast<int>(std::ceil(8.0 * std::sqrt(2.0) / ct)));
  CHECK_THROWS(default_grid_subdivision(1, std::numbers::pi / 5.0, 0.0));
}

TEST_CASE("covering radius examples") {
  const Domain line = Domain::unit_cube(1);
  PointSet P;
  P.dim = 1;
  P.coords = {0.25, 0.75};
  // probes at multiples of 1/8 include 0, 1/2 and 1; all three sit at 0.25
  CHECK(covering_radius(P, line, 9) == doctest::Approx(0.25).epsilon(1e-14));

  const Domain square = Domain::unit_cube(2);
  PointSet center;
  center.dim = 2;
  center.coords = {0.5, 0.5};
  CHECK(covering_radius(center, square, 65) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));  // corner probe is exact

  PointSet empty;
  empty.dim = 2;
  CHECK(std::isinf(covering_radius(empty, square, 16)));
  CHECK_THROWS(covering_radius(P, line, 4));  // resolution < 8
}

TEST_CASE("covering radius equals the brute-force oracle") {
  const Domain square = Domain::unit_cube(2);
  const PointSet P = sample_iid_uniform(square, 32, 2024, 0);
  const double fast = covering_radius(P, square, 100);
  const double slow = covering_radius_oracle(P, square, 100);
  CHECK(fast == slow);  // identical probe sets, identical arithmetic
  CHECK(covering_radius_serial(P, square, 100) == fast);

  const Domain lshape = Domain::l_shape_2d();
  const PointSet Q = sample_iid_uniform(lshape, 20, 7, 0);
  CHECK(covering_radius(Q, lshape, 64) == covering_radius_oracle(Q, lshape, 64));
}

TEST_CASE("covering radius is monotone under point insertion") {
  const Domain square = Domain::unit_cube(2);
  const RngStream rng = RngStream::from_seed(31);
  std::uint64_t ctr = 0;
  for (int trial = 0; trial < 20; ++trial) {
    PointSet P = sample_iid_uniform(square, 5 + static_cast<std::size_t>(trial),
                                    100 + static_cast<std::uint64_t>(trial), 0);
    const double before = covering_radius(P, square, 40);
    const std::vector<double> extra = random_point_in(square, rng, ctr);
    P.push_back(extra);
    CHECK(covering_radius(P, square, 40) <= before);
  }
}

TEST_CASE("covering radius inside a cone") {
  const Domain line = Domain::unit_cube(1);
  const Cone cone = line.cone_at(std::vector<double>{0.1}, 0.2);  // [0.1, 0.3]
  PointSet P;
  P.dim = 1;
  P.coords = {0.2, 0.9};  // only 0.2 is in the cone
  const double h = covering_radius(P, cone, 21);
  CHECK(h == doctest::Approx(0.1).epsilon(1e-12));  // measured at the interval ends
  PointSet outside;
  outside.dim = 1;
  outside.coords = {0.9};
  CHECK(std::isinf(covering_radius(outside, cone, 21)));
}

TEST_CASE("grid cells") {
  const Domain square = Domain::unit_cube(2);
  const GridCells inner = grid_cells(square, std::vector<double>{0.5, 0.5}, 0.5, 2);
  CHECK(inner.count() == 4);  // all quadrant cells inside
  const GridCells corner = grid_cells(square, std::vector<double>{0.0, 0.0}, 0.5, 2);
  CHECK(corner.count() == 1);  // only [0, 1/2]^2 survives
  CHECK_THROWS(grid_cells(square, std::vector<double>{0.5, 0.5}, 0.5, 0));

  // cardinality <= ell^d, equality when the cube is inside the closure
  const GridCells tight = grid_cells(square, std::vector<double>{0.5, 0.5}, 0.25, 3);
  CHECK(tight.count() == 9);

  // random (y, rho, ell = 5): equals an independent per-cell containment check
  const RngStream rng = RngStream::from_seed(88);
  std::uint64_t ctr = 0;
  for (const auto& dom : {Domain::unit_cube(2), Domain::l_shape_2d()}) {
    for (int trial = 0; trial < 25; ++trial) {
      const auto y = random_point_in(dom, rng, ctr);
      const double rho = 0.05 + 0.4 * rng.u01(ctr++);
      const int ell = 5;
      const GridCells cells = grid_cells(dom, y, rho, ell);
      CHECK(cells.count() <= static_cast<std::size_t>(ell * ell));
      // oracle: enumerate all ell^d cells, test each independently
      std::size_t expected = 0;
      const double side = 2.0 * rho / ell;
      for (int i = 0; i < ell; ++i)
        for (int j = 0; j < ell; ++j) {
          const double lo0 = y[0] - rho + i * side, lo1 = y[1] - rho + j * side;
          bool ok = dom.contains_closure(std::vector<double>{lo0 + side / 2, lo1 + side / 2});
          for (int mask = 0; ok && mask < 4; ++mask)
            ok = dom.contains_closure(std::vector<double>{(mask & 1) ? lo0 + side : lo0,
                                                          (mask & 2) ? lo1 + side : lo1});
          expected += ok ? 1 : 0;
        }
      CHECK(cells.count() == expected);
    }
  }
}

TEST_CASE("interior ball of a shrunk cone") {
  // B(x + 0.75*c_t*rho*xi, 0.5*c_t*rho*sin(theta)) stays inside the cone
  const RngStream rng = RngStream::from_seed(4096);
  std::uint64_t ctr = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(rng.u01(ctr++) * 3);
    Cone cone;
    cone.apex.assign(static_cast<std::size_t>(d), 0.0);
    cone.direction.assign(static_cast<std::size_t>(d), 0.0);
    std::vector<double> dir(static_cast<std::size_t>(d));
    double n2 = 0.0;
    for (int k = 0; k < d; ++k) {
      dir[static_cast<std::size_t>(k)] = rng.u01(ctr++) - 0.5;
      n2 += dir[static_cast<std::size_t>(k)] * dir[static_cast<std::size_t>(k)];
    }
    if (d == 1) {
      dir[0] = dir[0] < 0 ? -1.0 : 1.0;
      n2 = 1.0;
    }
    for (int k = 0; k < d; ++k)
      cone.direction[static_cast<std::size_t>(k)] = dir[static_cast<std::size_t>(k)] / std::sqrt(n2);
    cone.half_angle = 0.05 + rng.u01(ctr++) * (std::numbers::pi / 5.0 - 0.05);
    cone.radius = 0.1 + rng.u01(ctr++);

    const double ct = c_theta(cone.half_angle);
    const double ball_r = 0.5 * ct * cone.radius * std::sin(cone.half_angle);
    std::vector<double> center(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k)
      center[static_cast<std::size_t>(k)] =
          cone.apex[static_cast<std::size_t>(k)] +
          0.75 * ct * cone.radius * cone.direction[static_cast<std::size_t>(k)];
    int violations = 0;
    for (int probe = 0; probe < 100; ++probe) {
      std::vector<double> y(static_cast<std::size_t>(d));
      double m2 = 0.0;
      for (int k = 0; k < d; ++k) {
        y[static_cast<std::size_t>(k)] = rng.u01(ctr++) * 2.0 - 1.0;
        m2 += y[static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k)];
      }
      if (m2 > 1.0) continue;
      for (int k = 0; k < d; ++k)
        y[static_cast<std::size_t>(k)] =
            center[static_cast<std::size_t>(k)] + ball_r * y[static_cast<std::size_t>(k)];
      if (!cone.contains(y)) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("cone_contains consistent with cone_at inside the domain") {
  for (const auto& dom : {Domain::unit_cube(2), Domain::ball(2), Domain::l_shape_2d()}) {
    const RngStream rng = RngStream::from_seed(777);
    std::uint64_t ctr = 0;
    for (int t = 0; t < 1000; ++t) {
      const auto x = random_point_in(dom, rng, ctr);
      const double rho = dom.cone_radius * (0.1 + 0.9 * rng.u01(ctr++));
      const Cone cone = dom.cone_at(x, rho);
      const auto y = random_point_in(dom, rng, ctr);
      if (cone.contains(y)) CHECK(dom.contains_closure(y));
    }
  }
}
