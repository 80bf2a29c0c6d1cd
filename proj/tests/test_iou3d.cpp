#include <doctest.h>

#include <cmath>

#include "spatialforge/iou3d.hpp"
#include "spatialforge/rng.hpp"
#include "support/oracles.hpp"

using namespace spatialforge;

namespace {
Box3D make_box(double x, double y, double z, double sx, double sy, double sz,
               double p = 0, double yw = 0, double r = 0) {
  Box3D b;
  b.center = Vec3(x, y, z);
  b.size = Vec3(sx, sy, sz);
  b.angles = {p, yw, r};
  return b;
}
}  // namespace

TEST_CASE("iou3d trivial cases") {
  Box3D a = make_box(0.3, -0.1, 2.0, 1.0, 0.8, 1.2, 0.1, 0.2, -0.3);
  CHECK(iou3d(a, a) == doctest::Approx(1.0).epsilon(1e-9));

  Box3D far = make_box(10.3, -0.1, 2.0, 1, 1, 1);
  Box3D near = make_box(0.3, -0.1, 2.0, 1, 1, 1);
  CHECK(iou3d(near, far) == 0.0);
}

TEST_CASE("iou3d analytic: unit cubes offset by 0.5") {
  Box3D a = make_box(0, 0, 0, 1, 1, 1);
  Box3D b = make_box(0.5, 0, 0, 1, 1, 1);
  // overlap 0.5, union 1.5
  CHECK(iou3d(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("iou3d analytic: rotated square footprint") {
  // 45-degree yaw on a cube inside a matching cube: intersection is the
  // square-with-chamfered-corners prism, area 2*(sqrt(2)-1)... use the known
  // octagon area: for unit squares at same center rotated 45 deg the overlap
  // area is 8*(sqrt(2)-1)/... easier checked against the MC oracle below;
  // here assert symmetry under argument order instead.
  Box3D a = make_box(0.2, 0.1, 1.0, 1.0, 2.0, 0.7, 0.05, 0.3, -0.2);
  Box3D b = make_box(0.4, -0.2, 1.3, 1.5, 0.6, 1.1, -0.15, 0.7, 0.08);
  CHECK(iou3d(a, b) == iou3d(b, a));  // exact, by canonical clip order
  CHECK(iou3d(a, b) > 0.0);
}

TEST_CASE("iou3d degenerate box throws") {
  Box3D a = make_box(0, 0, 0, 1, 1, 1);
  Box3D bad = make_box(0, 0, 0, 1e-12, 1, 1);
  CHECK_THROWS_AS(iou3d(a, bad), DegenerateBox);
}

TEST_CASE("iou3d agrees with Monte-Carlo on random rotated pairs") {
  Rng rng(31337);
  double max_err = 0.0;
  for (int i = 0; i < 60; ++i) {
    Box3D a = oracles::random_box(rng);
    Box3D b = oracles::random_box(rng);
    double exact = iou3d(a, b);
    double mc = oracles::mc_iou(a, b, 200000, rng.next_u64());
    max_err = std::max(max_err, std::abs(exact - mc));
  }
  // acceptance runs the full 500x1e6 version; this is the fast gate
  CHECK(max_err < 7e-3);
}

TEST_CASE("iou3d invariant under a common rigid transform") {
  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    Box3D a = oracles::random_box(rng);
    Box3D b = oracles::random_box(rng, 0.6);
    Pose p{oracles::random_rotation(rng),
           Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3))};
    double before = iou3d(a, b);
    double after = iou3d(transform_box(a, p), transform_box(b, p));
    CHECK(std::abs(before - after) < 1e-6);
  }
}

TEST_CASE("intersection volume of nested boxes is the inner volume") {
  Box3D outer = make_box(0, 0, 0, 4, 4, 4, 0.1, 0.2, 0.3);
  Box3D inner = make_box(0, 0, 0, 1, 1, 1, 0.1, 0.2, 0.3);
  CHECK(intersection_volume(inner, outer) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(iou3d(inner, outer) == doctest::Approx(1.0 / 64.0).epsilon(1e-9));
}
