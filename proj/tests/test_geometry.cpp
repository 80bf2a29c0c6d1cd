#include <doctest.h>

#include <cmath>

#include "spatialforge/geometry.hpp"
#include "support/oracles.hpp"

using namespace spatialforge;

TEST_CASE("euler_to_matrix basics") {
  CHECK((euler_to_matrix({0, 0, 0}) - Mat3::Identity()).norm() < 1e-12);

  // (0, 0.5, 0) is 90 degrees about Y: forward (+Z) maps to +X
  Mat3 m = euler_to_matrix({0, 0.5, 0});
  Vec3 fwd = m * Vec3::UnitZ();
  CHECK((fwd - Vec3::UnitX()).norm() < 1e-12);

  // camera convention: +X projects right of center, +Y below center
  CameraModel cam(100, 100, 50.0);
  auto right = project_point(cam, Vec3(1, 0, 2));
  auto down = project_point(cam, Vec3(0, 1, 2));
  REQUIRE(right);
  REQUIRE(down);
  CHECK(right->x() > cam.cx);
  CHECK(down->y() > cam.cy);
}

TEST_CASE("matrix_to_euler inverts euler_to_matrix") {
  CHECK(matrix_to_euler(Mat3::Identity()).angles.pitch == doctest::Approx(0));
  auto d = matrix_to_euler(euler_to_matrix({0, 0.5, 0}));
  CHECK(d.angles.yaw == doctest::Approx(0.5));

  // production annotation values round-trip
  EulerAngles a{0.11, 0.28, 0.05};
  auto back = matrix_to_euler(euler_to_matrix(a));
  CHECK_FALSE(back.gimbal_lock);
  CHECK(back.angles.pitch == doctest::Approx(0.11).epsilon(1e-9));
  CHECK(back.angles.yaw == doctest::Approx(0.28).epsilon(1e-9));
  CHECK(back.angles.roll == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("euler round-trip over random rotations") {
  Rng rng(1234);
  for (int i = 0; i < 1000; ++i) {
    Mat3 r = oracles::random_rotation(rng);
    auto d = matrix_to_euler(r);
    if (d.gimbal_lock) continue;  // measure-zero; branch tested separately
    Mat3 r2 = euler_to_matrix(d.angles);
    CHECK((r - r2).norm() < 1e-6);
  }
}

TEST_CASE("gimbal lock branch: yaw saturated, roll zeroed, rotation preserved") {
  for (double sign : {1.0, -1.0}) {
    Mat3 locked = euler_to_matrix({0.2, sign * 0.5, 0.1});
    auto d = matrix_to_euler(locked);
    CHECK(d.gimbal_lock);
    CHECK(d.angles.yaw == doctest::Approx(sign * 0.5));
    CHECK(d.angles.roll == 0.0);
    CHECK((euler_to_matrix(d.angles) - locked).norm() < 1e-9);
  }
}

TEST_CASE("euler_to_quaternion") {
  auto q0 = euler_to_quaternion({0, 0, 0});
  CHECK(q0.w == doctest::Approx(1.0));
  CHECK(std::abs(q0.x) + std::abs(q0.y) + std::abs(q0.z) < 1e-12);

  // 180 degrees about Y -> (0,0,1,0) up to sign
  auto qy = euler_to_quaternion({0, 1, 0});
  CHECK(std::abs(qy.y) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(qy.w) < 1e-9);

  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    EulerAngles a = oracles::random_angles(rng);
    Mat3 via_q = quaternion_to_matrix(euler_to_quaternion(a));
    CHECK((via_q - euler_to_matrix(a)).norm() < 1e-9);
    CHECK(euler_to_quaternion(a).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("transform_box") {
  Box3D box;
  box.center = Vec3(0.5, -0.2, 2.0);
  box.size = Vec3(1, 2, 3);
  box.angles = {0.1, 0.2, -0.05};
  box.label = "chair";

  SUBCASE("identity pose is a no-op") {
    Box3D out = transform_box(box, Pose::identity());
    CHECK((out.center - box.center).norm() < 1e-12);
    CHECK(out.angles.yaw == doctest::Approx(box.angles.yaw));
  }

  SUBCASE("pure translation moves the center only") {
    Pose t;
    t.translation = Vec3(0, 0, 1);
    Box3D out = transform_box(box, t);
    CHECK(out.center.z() == doctest::Approx(3.0));
    CHECK(out.angles.pitch == doctest::Approx(box.angles.pitch));
    CHECK(out.angles.roll == doctest::Approx(box.angles.roll));
    CHECK((out.size - box.size).norm() == 0.0);
  }

  SUBCASE("two 90-degree yaws equal one 180-degree yaw") {
    Pose yaw90;
    yaw90.rotation = euler_to_matrix({0, 0.5, 0});
    Pose yaw180;
    yaw180.rotation = euler_to_matrix({0, 1.0, 0});
    Box3D twice = transform_box(transform_box(box, yaw90), yaw90);
    Box3D once = transform_box(box, yaw180);
    CHECK((twice.center - once.center).norm() < 1e-9);
    CHECK((euler_to_matrix(twice.angles) - euler_to_matrix(once.angles)).norm() <
          1e-6);
  }

  SUBCASE("rigid motion preserves size and corner distances") {
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
      Pose p{oracles::random_rotation(rng),
             Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))};
      Box3D out = transform_box(box, p);
      CHECK((out.size - box.size).norm() == 0.0);
      auto ca = box_corners(box);
      auto cb = box_corners(out);
      for (int j = 1; j < 8; ++j) {
        double da = (ca[j] - ca[0]).norm();
        double db = (cb[j] - cb[0]).norm();
        CHECK(std::abs(da - db) < 1e-9);
      }
    }
  }
}

TEST_CASE("project/unproject") {
  // intrinsics from the indoor-scan fixture: W=959, H=696, hfov=69.16 deg
  CameraModel cam = CameraModel::from_hfov_deg(959, 696, 69.16);
  CHECK(cam.focal == doctest::Approx(695.5941672783265).epsilon(1e-12));

  SUBCASE("optical axis hits the principal point") {
    auto px = project_point(cam, Vec3(0, 0, 2));
    REQUIRE(px);
    CHECK(px->x() == doctest::Approx(cam.cx));
    CHECK(px->y() == doctest::Approx(cam.cy));
  }

  SUBCASE("behind camera") {
    CHECK_FALSE(project_point(cam, Vec3(0, 0, -1)));
    CHECK_FALSE(project_point(cam, Vec3(0.3, 0.1, 0.0)));
  }

  SUBCASE("u = cx + f/2 for p=(1,0,2)") {
    auto px = project_point(cam, Vec3(1, 0, 2));
    REQUIRE(px);
    CHECK(px->x() == doctest::Approx(827.2970836391632).epsilon(1e-12));
  }

  SUBCASE("unproject basics") {
    Vec3 p = unproject_pixel(cam, cam.cx, cam.cy, 1.0);
    CHECK((p - Vec3(0, 0, 1)).norm() < 1e-12);
    CHECK_THROWS_AS(unproject_pixel(cam, 10, 10, 0.0), NonPositiveDepth);
  }

  SUBCASE("round-trip over random pixels and depths") {
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
      double u = rng.uniform(0, cam.width);
      double v = rng.uniform(0, cam.height);
      double d = rng.uniform(0.05, 50.0);
      auto px = project_point(cam, unproject_pixel(cam, u, v, d));
      REQUIRE(px);
      CHECK(std::abs(px->x() - u) < 1e-6);
      CHECK(std::abs(px->y() - v) < 1e-6);
    }
  }
}

TEST_CASE("box_corners") {
  Box3D unit;
  unit.center = Vec3::Zero();
  unit.size = Vec3(1, 1, 1);

  SUBCASE("unit cube at origin") {
    auto c = box_corners(unit);
    Vec3 centroid = Vec3::Zero();
    for (const auto& p : c) {
      centroid += p;
      for (int k = 0; k < 3; ++k) CHECK(std::abs(std::abs(p[k]) - 0.5) < 1e-12);
    }
    CHECK((centroid / 8.0).norm() < 1e-12);
  }

  SUBCASE("90-degree yaw swaps x/z extents") {
    Box3D b;
    b.size = Vec3(2, 1, 1);
    b.angles = {0, 0.5, 0};
    auto c = box_corners(b);
    double max_x = 0, max_z = 0;
    for (const auto& p : c) {
      max_x = std::max(max_x, std::abs(p.x()));
      max_z = std::max(max_z, std::abs(p.z()));
    }
    CHECK(max_x == doctest::Approx(0.5));
    CHECK(max_z == doctest::Approx(1.0));
  }

  SUBCASE("edge lengths match size fields") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
      Box3D b = oracles::random_box(rng);
      auto c = box_corners(b);
      // corner order: 0-1 spans x, 0-3 spans z, 0-4 spans y
      CHECK(std::abs((c[1] - c[0]).norm() - b.size.x()) < 1e-9);
      CHECK(std::abs((c[3] - c[0]).norm() - b.size.z()) < 1e-9);
      CHECK(std::abs((c[4] - c[0]).norm() - b.size.y()) < 1e-9);
    }
  }
}

TEST_CASE("two-decimal serialization helpers") {
  CHECK(format2(0.4) == "0.40");
  CHECK(format2(-0.16) == "-0.16");
  CHECK(format2(1.555) == "1.56");
  CHECK(format2(-0.0001) == "0.00");
  CHECK(round2(0.125) == doctest::Approx(0.13));  // half away from zero
  CHECK(format2(2.0) == "2.00");
}

TEST_CASE("camera model validation") {
  CHECK_THROWS_AS(CameraModel(0, 100, 50.0), ValidationError);
  CHECK_THROWS_AS(CameraModel(100, 100, 0.0), InvalidFocal);
  CameraModel cam(100, 80, 50.0);
  CHECK(cam.hfov() > 0.0);
  CHECK(cam.hfov() < M_PI);
  CHECK(cam.cx == doctest::Approx(50.0));
}

TEST_CASE("pose validation and composition") {
  CHECK_THROWS_AS(Pose::validated(Mat3::Zero(), Vec3::Zero()), ValidationError);
  Rng rng(11);
  Mat3 r = oracles::random_rotation(rng);
  Pose p = Pose::validated(r, Vec3(1, 2, 3));
  Pose q = p.compose(p.inverse());
  CHECK((q.rotation - Mat3::Identity()).norm() < 1e-12);
  CHECK(q.translation.norm() < 1e-12);
}
