#include <doctest.h>

#include <cmath>

#include "spatialforge/fov_unify.hpp"
#include "spatialforge/rng.hpp"

using namespace spatialforge;

namespace {
// FoV drift allowed by rounding dims to the nearest integer: half a pixel
// through the derivative of 2*atan(w/(2f)).
double rounding_bound(double f_new) { return 2.0 * 0.5 / (2.0 * f_new); }
}  // namespace

TEST_CASE("unify_fov identity") {
  CameraModel cam(800, 600, 400.0);
  UnifyResult r = unify_fov(cam, 400.0);
  CHECK(r.new_width == 800);
  CHECK(r.new_height == 600);
  CHECK(r.scale_x == doctest::Approx(1.0));
  CHECK(r.scale_y == doctest::Approx(1.0));
  CHECK(r.new_cam.focal == 400.0);
}

TEST_CASE("unify_fov rejects non-positive focal") {
  CameraModel cam(800, 600, 400.0);
  CHECK_THROWS_AS(unify_fov(cam, 0.0), InvalidFocal);
  CHECK_THROWS_AS(unify_fov(cam, -5.0), InvalidFocal);
}

TEST_CASE("unify_fov golden: indoor-scan intrinsics to f_new=500") {
  // W=959, H=696, hfov=69.16 deg => f = 695.5941672783265
  CameraModel cam = CameraModel::from_hfov_deg(959, 696, 69.16);
  UnifyResult r = unify_fov(cam, 500.0);
  // real-valued dims 689.3387301911328 x 500.291716593356, nearest ints:
  CHECK(r.new_width == 689);
  CHECK(r.new_height == 500);
  CHECK(r.scale_x == doctest::Approx(689.0 / 959.0).epsilon(1e-12));
  CHECK(r.scale_y == doctest::Approx(500.0 / 696.0).epsilon(1e-12));
  CHECK(r.new_cam.focal == 500.0);
  // FoV preserved within the rounding bound
  CHECK(std::abs(r.new_cam.hfov() - cam.hfov()) <= rounding_bound(500.0));
  CHECK(std::abs(r.new_cam.vfov() - cam.vfov()) <= rounding_bound(500.0));
}

TEST_CASE("unify_fov preserves FoV for random cameras") {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    int w = static_cast<int>(rng.range(64, 4096));
    int h = static_cast<int>(rng.range(64, 4096));
    double f = rng.uniform(0.3 * w, 3.0 * w);
    double f_new = rng.uniform(100.0, 1500.0);
    CameraModel cam(w, h, f);

    // pre-rounding relation is exact: 2*atan(w_real/(2 f_new)) == hfov
    double w_real = 2.0 * f_new * std::tan(0.5 * cam.hfov());
    CHECK(std::abs(2.0 * std::atan(w_real / (2.0 * f_new)) - cam.hfov()) < 1e-9);

    UnifyResult r = unify_fov(cam, f_new);
    CHECK(std::abs(r.new_cam.hfov() - cam.hfov()) <= rounding_bound(f_new) + 1e-12);
    CHECK(std::abs(r.new_cam.vfov() - cam.vfov()) <= rounding_bound(f_new) + 1e-12);
    CHECK(r.new_width >= 1);
    CHECK(r.new_height >= 1);
  }
}

TEST_CASE("double unification lands on the same FoV as direct") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    int w = static_cast<int>(rng.range(200, 2000));
    int h = static_cast<int>(rng.range(200, 2000));
    CameraModel cam(w, h, rng.uniform(0.4 * w, 2.0 * w));
    double f1 = rng.uniform(200.0, 900.0);
    double f2 = rng.uniform(200.0, 900.0);
    UnifyResult once = unify_fov(cam, f2);
    UnifyResult twice = unify_fov(unify_fov(cam, f1).new_cam, f2);
    // both seeded by the same FoV up to two rounding steps
    double bound = 2.0 * (rounding_bound(f1) + rounding_bound(f2));
    CHECK(std::abs(once.new_cam.hfov() - twice.new_cam.hfov()) <= bound);
    CHECK(std::abs(once.new_cam.vfov() - twice.new_cam.vfov()) <= bound);
  }
}

TEST_CASE("rescale_2d") {
  CameraModel new_cam(50, 50, 100.0);

  SUBCASE("identity scale") {
    Box2 b{0, 0, 40, 30};
    Box2 out = rescale_box(b, 1.0, 1.0, new_cam);
    CHECK(out.x2 == doctest::Approx(40));
    CHECK(out.y2 == doctest::Approx(30));
  }

  SUBCASE("half scale") {
    Box2 b{0, 0, 100, 100};
    Box2 out = rescale_box(b, 0.5, 0.5, new_cam);
    CHECK(out.x1 == doctest::Approx(0));
    CHECK(out.y1 == doctest::Approx(0));
    CHECK(out.x2 == doctest::Approx(50));
    CHECK(out.y2 == doctest::Approx(50));
  }

  SUBCASE("clamps to new image bounds") {
    Vec2 p = rescale_point(Vec2(80, 10), 1.0, 1.0, new_cam);
    CHECK(p.x() == doctest::Approx(50));  // clamped
    CHECK(p.y() == doctest::Approx(10));
  }

  SUBCASE("area scales by sx*sy for interior boxes") {
    Rng rng(3);
    CameraModel big(10000, 10000, 100.0);
    for (int i = 0; i < 200; ++i) {
      double x1 = rng.uniform(0, 400), y1 = rng.uniform(0, 400);
      Box2 b{x1, y1, x1 + rng.uniform(1, 100), y1 + rng.uniform(1, 100)};
      double sx = rng.uniform(0.1, 3.0), sy = rng.uniform(0.1, 3.0);
      Box2 out = rescale_box(b, sx, sy, big);
      double area_in = (b.x2 - b.x1) * (b.y2 - b.y1);
      double area_out = (out.x2 - out.x1) * (out.y2 - out.y1);
      CHECK(area_out == doctest::Approx(area_in * sx * sy).epsilon(1e-9));
    }
  }
}
