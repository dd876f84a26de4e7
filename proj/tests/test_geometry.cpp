#include <cmath>

#include "bisweep/geometry.hpp"
#include "doctest.h"

using namespace bisweep;

namespace {

PolygonDomain unit_square() {
  return PolygonDomain::from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

PolygonDomain lshape() {
  return PolygonDomain::from_vertices({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
}

}  // namespace

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(PolygonDomain::from_vertices({{0, 0}, {1, 0}}), input_error);
  // CW order rejected
  CHECK_THROWS_AS(PolygonDomain::from_vertices({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), input_error);
  // bowtie self-intersection rejected
  CHECK_THROWS_AS(PolygonDomain::from_vertices({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), input_error);
  // collinear middle vertex rejected
  CHECK_THROWS_AS(PolygonDomain::from_vertices({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}}),
                  input_error);
  // duplicate consecutive vertices rejected
  CHECK_THROWS_AS(PolygonDomain::from_vertices({{0, 0}, {0, 0}, {1, 0}, {1, 1}}), input_error);
}

TEST_CASE("square geometry") {
  auto sq = unit_square();
  CHECK(sq.area == doctest::Approx(1.0));
  CHECK(sq.perimeter == doctest::Approx(4.0));
  CHECK(sq.diameter == doctest::Approx(std::sqrt(2.0)));
  for (double a : sq.interior_angle) CHECK(a == doctest::Approx(pi / 2));
  CHECK(sq.centroid().isApprox(Vec2(0.5, 0.5), 1e-14));
}

TEST_CASE("L-shape geometry") {
  auto L = lshape();
  CHECK(L.area == doctest::Approx(3.0));
  CHECK(L.perimeter == doctest::Approx(8.0));
  CHECK(L.interior_angle[3] == doctest::Approx(1.5 * pi));  // reflex corner at (1,1)
  double angle_sum = 0;
  for (double a : L.interior_angle) angle_sum += a;
  CHECK(angle_sum == doctest::Approx((L.size() - 2) * pi));
}

TEST_CASE("membership and boundary queries") {
  auto L = lshape();
  CHECK(L.contains({0.5, 0.5}));
  CHECK(L.contains({0.5, 1.5}));
  CHECK_FALSE(L.contains({1.5, 1.5}));  // inside the notch
  CHECK(L.contains({1.0, 0.5}));        // interior point
  CHECK(L.contains({2.0, 0.5}));        // on an edge
  CHECK(L.contains({1.0, 1.0}));        // at the reflex vertex
  CHECK_FALSE(L.contains({2.5, 0.5}));
  CHECK(L.boundary_distance({0.5, 0.5}) == doctest::Approx(0.5));
  CHECK(L.boundary_distance({1.5, 1.5}) == doctest::Approx(0.5));  // outside, to the notch corner edges
}

TEST_CASE("arc-length parameterization walks the boundary CCW") {
  auto L = lshape();
  auto p0 = L.point_at(0.0);
  CHECK(p0.xy.isApprox(Vec2(0, 0), 1e-14));
  auto p1 = L.point_at(1.0);
  CHECK(p1.xy.isApprox(Vec2(1, 0), 1e-14));
  auto p2 = L.point_at(2.5);
  CHECK(p2.xy.isApprox(Vec2(2, 0.5), 1e-14));
  // wrap-around
  auto pw = L.point_at(8.0 + 0.25);
  CHECK(pw.xy.isApprox(Vec2(0.25, 0), 1e-14));
  auto pn = L.point_at(-0.5);
  CHECK(pn.xy.isApprox(Vec2(0, 0.5), 1e-14));
  // projection inverts point_at on the boundary
  for (double s : {0.3, 2.7, 4.1, 6.9}) {
    auto bp = L.point_at(s);
    auto pr = L.project_to_boundary(bp.xy);
    CHECK(pr.s == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("inclusion membership resolves boundary points to the inclusion") {
  auto disk = Inclusion::disk({0.5, 0.5}, 0.25, 0.5);
  CHECK(disk.contains({0.5, 0.5}));
  CHECK(disk.contains({0.75, 0.5}));  // exactly on the circle
  CHECK_FALSE(disk.contains({0.76, 0.5}));
  auto rect = Inclusion::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 2.0);
  CHECK(rect.contains({0.5, 0.0}));
  CHECK_FALSE(rect.contains({0.5, -0.01}));
  CHECK_THROWS_AS(Inclusion::disk({0, 0}, 0.1, 1.0), input_error);  // contrast 1 is no contrast
  CHECK_THROWS_AS(Inclusion::disk({0, 0}, -0.1, 0.5), input_error);
}

TEST_CASE("disk polygonization respects the sagitta bound") {
  auto disk = Inclusion::disk({0, 0}, 0.5, 0.5);
  const double sag = 1e-3;
  auto poly = disk.polygonize(sag);
  REQUIRE(poly.size() >= 12);
  for (size_t i = 0; i < poly.size(); ++i) {
    CHECK(poly[i].norm() == doctest::Approx(0.5).epsilon(1e-12));
    const Vec2 mid = 0.5 * (poly[i] + poly[(i + 1) % poly.size()]);
    CHECK(0.5 - mid.norm() <= sag * 1.0000001);
  }
}

TEST_CASE("phantom admissibility") {
  auto L = lshape();
  auto disk = Inclusion::disk({1.45, 0.5}, 0.25, 0.5);
  auto rect = Inclusion::polygon({{0.3, 1.2}, {0.7, 1.2}, {0.7, 1.6}, {0.3, 1.6}}, 0.5);
  auto ph = Phantom::create(L, {disk, rect});
  CHECK(ph.clearance() == doctest::Approx(0.25));
  CHECK(ph.evaluate_sigma({1.45, 0.5}) == doctest::Approx(0.5));
  CHECK(ph.evaluate_sigma({0.5, 0.5}) == doctest::Approx(1.0));
  CHECK(ph.evaluate_sigma({1.45, 0.15}) == doctest::Approx(1.0));
  // on the disk boundary: resolves to the inclusion value
  CHECK(ph.evaluate_sigma({1.7, 0.5}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ph.evaluate_sigma({3.0, 3.0}), input_error);

  // touching the boundary: zero clearance
  auto touching = Inclusion::disk({0.5, 0.5}, 0.5, 0.5);
  CHECK_THROWS_AS(Phantom::create(lshape(), {touching}), input_error);
  // overlapping inclusions
  auto d1 = Inclusion::disk({0.9, 0.9}, 0.3, 0.5);
  auto d2 = Inclusion::disk({1.2, 0.9}, 0.3, 0.5);
  CHECK_THROWS_AS(Phantom::create(lshape(), {d1, d2}), input_error);
  // clearance below the configured minimum fraction
  auto tight = Inclusion::disk({0.5, 0.5}, 0.45, 0.5);
  CHECK_THROWS_AS(Phantom::create(unit_square(), {tight}, 0.05), input_error);
  // no inclusions: clearance is +inf, sigma is 1 everywhere
  auto empty = Phantom::create(unit_square(), {});
  CHECK(std::isinf(empty.clearance()));
  CHECK(empty.evaluate_sigma({0.5, 0.5}) == 1.0);
}

TEST_CASE("nested inclusions are rejected") {
  auto outer = Inclusion::polygon({{0.2, 0.2}, {0.8, 0.2}, {0.8, 0.8}, {0.2, 0.8}}, 0.5);
  auto inner = Inclusion::disk({0.5, 0.5}, 0.1, 2.0);
  CHECK_THROWS_AS(Phantom::create(unit_square(), {outer, inner}, 0.0), input_error);
}
