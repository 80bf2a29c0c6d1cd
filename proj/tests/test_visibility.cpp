#include <doctest.h>

#include <map>

#include "spatialforge/visibility.hpp"
#include "spatialforge/rng.hpp"

using namespace spatialforge;

namespace {
CameraModel test_cam() { return CameraModel(100, 80, 60.0); }
}  // namespace

TEST_CASE("check_visibility verdicts in criterion order") {
  CameraModel cam = test_cam();
  DepthMap depth = DepthMap::filled(100, 80, 10.0f);
  Pose identity = Pose::identity();

  SUBCASE("unoccluded point on the optical axis") {
    auto v = check_visibility(Vec3(0, 0, 10.0), identity, cam, depth);
    CHECK(v.status == Visibility::Visible);
    REQUIRE(v.pixel);
    CHECK(v.pixel->x() == doctest::Approx(50.0));
  }

  SUBCASE("behind camera") {
    auto v = check_visibility(Vec3(0, 0, -1.0), identity, cam, depth);
    CHECK(v.status == Visibility::BehindCamera);
    CHECK_FALSE(v.pixel);
  }

  SUBCASE("out of bounds") {
    auto v = check_visibility(Vec3(5.0, 0, 1.0), identity, cam, depth);
    CHECK(v.status == Visibility::OutOfBounds);
  }

  SUBCASE("five percent rule") {
    DepthMap d = DepthMap::filled(100, 80, 1.0f);
    auto occluded = check_visibility(Vec3(0, 0, 2.0), identity, cam, d);
    CHECK(occluded.status == Visibility::Occluded);  // gap 0.5 > 0.05

    DepthMap d2 = DepthMap::filled(100, 80, 1.95f);
    auto visible = check_visibility(Vec3(0, 0, 2.0), identity, cam, d2);
    CHECK(visible.status == Visibility::Visible);  // gap 0.025 <= 0.05
  }

  SUBCASE("invalid depth pixel") {
    DepthMap d = DepthMap::filled(100, 80, 0.0f);
    auto v = check_visibility(Vec3(0, 0, 2.0), identity, cam, d);
    CHECK(v.status == Visibility::NoDepth);
  }

  SUBCASE("camera pose is honored") {
    Pose pose;  // camera at (0,0,5) looking forward
    pose.translation = Vec3(0, 0, 5);
    auto v = check_visibility(Vec3(0, 0, 4.0), pose, cam, depth);
    CHECK(v.status == Visibility::BehindCamera);  // point is behind this camera
    auto v2 = check_visibility(Vec3(0, 0, 9.0), pose, cam, depth);
    CHECK(v2.status == Visibility::Occluded);  // map says 10 m, point at 4 m
  }
}

TEST_CASE("rel_tol zero accepts only exact depth agreement") {
  CameraModel cam = test_cam();
  DepthMap d = DepthMap::filled(100, 80, 2.0f);
  auto exact = check_visibility(Vec3(0, 0, 2.0), Pose::identity(), cam, d, 0.0);
  CHECK(exact.status == Visibility::Visible);
  auto off = check_visibility(Vec3(0, 0, 2.001), Pose::identity(), cam, d, 0.0);
  CHECK(off.status == Visibility::Occluded);
}

TEST_CASE("visible set grows with rel_tol") {
  CameraModel cam = test_cam();
  Pose identity = Pose::identity();
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    float z_map = static_cast<float>(rng.uniform(0.5, 6.0));
    DepthMap d = DepthMap::filled(100, 80, z_map);
    Vec3 p(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2), rng.uniform(0.5, 6.0));
    bool prev_visible = false;
    for (double tol : {0.0, 0.02, 0.05, 0.2, 1.0}) {
      auto v = check_visibility(p, identity, cam, d, tol);
      if (v.status != Visibility::Visible && v.status != Visibility::Occluded)
        break;  // bounds outcome does not depend on tol
      bool vis = v.status == Visibility::Visible;
      CHECK((vis || !prev_visible));  // monotone: once visible, stays visible
      prev_visible = vis;
    }
  }
}

TEST_CASE("sample_instance_points") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back(i, 0, 0);

  SUBCASE("n equal to set size is a permutation") {
    auto out = sample_instance_points(pts, 8, 7);
    REQUIRE(out.size() == 8);
    std::vector<int> seen(8, 0);
    for (const auto& p : out) seen[static_cast<int>(p.x())]++;
    for (int c : seen) CHECK(c == 1);
  }

  SUBCASE("deterministic under a fixed seed") {
    auto a = sample_instance_points(pts, 5, 99);
    auto b = sample_instance_points(pts, 5, 99);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }

  SUBCASE("with replacement when n exceeds the set") {
    auto out = sample_instance_points(pts, 20, 1);
    CHECK(out.size() == 20);
  }

  SUBCASE("empty instance throws") {
    CHECK_THROWS_AS(sample_instance_points({}, 4, 0), EmptyInstance);
  }

  SUBCASE("chi-square uniformity of single draws") {
    // 1e5 single-point draws from 8 points; 7 dof, p>0.01 -> chi2 < 18.475
    std::map<int, int> counts;
    const int kDraws = 100000;
    for (int i = 0; i < kDraws; ++i) {
      auto out = sample_instance_points(pts, 1, 1000003ULL * i + 17);
      counts[static_cast<int>(out[0].x())]++;
    }
    double expected = kDraws / 8.0;
    double chi2 = 0.0;
    for (int k = 0; k < 8; ++k) {
      double d = counts[k] - expected;
      chi2 += d * d / expected;
    }
    CHECK(chi2 < 18.475306906582365);
  }
}

TEST_CASE("gen_correspondence") {
  CameraModel cam = test_cam();
  DepthMap far_depth = DepthMap::filled(100, 80, 100.0f);

  std::vector<Vec3> instance;
  Rng rng(5);
  for (int i = 0; i < 64; ++i)
    instance.emplace_back(rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3),
                          rng.uniform(2.5, 3.5));
  // depth maps that exactly match each point are impractical; use a tolerant
  // rel_tol so every projected point counts as visible
  FrameGeometry fa{Pose::identity(), cam, &far_depth};

  SUBCASE("identical frames produce identical pixels") {
    auto pairs = gen_correspondence(fa, fa, instance, 16, 3, 100.0);
    CHECK(!pairs.empty());
    for (const auto& pr : pairs) {
      CHECK(pr.a.x() == doctest::Approx(pr.b.x()));
      CHECK(pr.a.y() == doctest::Approx(pr.b.y()));
    }
  }

  SUBCASE("frame rotated 180 degrees away sees nothing") {
    Pose flipped;
    flipped.rotation = euler_to_matrix({0, 1.0, 0});
    FrameGeometry fb{flipped, cam, &far_depth};
    auto pairs = gen_correspondence(fa, fb, instance, 16, 3, 100.0);
    CHECK(pairs.empty());
  }

  SUBCASE("swapping frames swaps pair order, same set") {
    Pose shifted;
    shifted.translation = Vec3(0.2, 0, 0);
    FrameGeometry fb{shifted, cam, &far_depth};
    auto ab = gen_correspondence(fa, fb, instance, 16, 3, 100.0);
    auto ba = gen_correspondence(fb, fa, instance, 16, 3, 100.0);
    REQUIRE(ab.size() == ba.size());
    for (size_t i = 0; i < ab.size(); ++i) {
      CHECK(ab[i].a == ba[i].b);
      CHECK(ab[i].b == ba[i].a);
    }
  }
}

TEST_CASE("occluder slab: surviving set matches ray-derived truth") {
  // Camera A at origin, camera B shifted +0.6 in x, both looking +Z.
  // Sample points sit on the z = 3 plane (depth maps record that surface);
  // a slab occupies x in [0.15, 0.45], y in [-1, 1] at z = 1.5. Grid points
  // are placed so every ray-slab crossing clears the slab border by 0.05 m
  // (4 px at this focal length), well beyond nearest-neighbor rounding.
  CameraModel cam(200, 160, 120.0);
  Pose pose_a = Pose::identity();
  Pose pose_b;
  pose_b.translation = Vec3(0.6, 0, 0);

  const double kSlabX0 = 0.15, kSlabX1 = 0.45, kSlabZ = 1.5, kSurfaceZ = 3.0;

  auto make_depth = [&](const Pose& pose) {
    DepthMap d = DepthMap::filled(200, 160, static_cast<float>(kSurfaceZ));
    for (int y = 0; y < 160; ++y)
      for (int x = 0; x < 200; ++x) {
        Vec3 at = unproject_pixel(cam, x, y, kSlabZ);
        Vec3 world = pose.apply(at);
        if (world.x() >= kSlabX0 && world.x() <= kSlabX1 && world.y() >= -1 &&
            world.y() <= 1)
          d.at(x, y) = static_cast<float>(kSlabZ);
      }
    return d;
  };
  DepthMap da = make_depth(pose_a);
  DepthMap db = make_depth(pose_b);

  auto blocked = [&](const Pose& pose, const Vec3& p_world) {
    // ray from the camera center to the point, in world coords
    Vec3 origin = pose.translation;
    Vec3 dir = p_world - origin;
    double t = (kSlabZ - origin.z()) / dir.z();
    Vec3 hit = origin + t * dir;
    return hit.x() >= kSlabX0 && hit.x() <= kSlabX1 && hit.y() >= -1 &&
           hit.y() <= 1;
  };

  std::vector<Vec3> pts;
  for (double x = -0.4; x <= 0.41; x += 0.2)
    for (double y = -0.3; y <= 0.31; y += 0.15) pts.emplace_back(x, y, kSurfaceZ);

  FrameGeometry fa{pose_a, cam, &da};
  FrameGeometry fb{pose_b, cam, &db};

  // A blocks rays with x/2 in the slab range: x = 0.4 only.
  // B blocks rays with 0.3 + x/2 in range: x in {-0.2, 0, 0.2}.
  // Surviving columns: x = -0.4 (5 points).
  int expected = 0;
  for (const auto& p : pts)
    if (!blocked(pose_a, p) && !blocked(pose_b, p)) ++expected;
  CHECK(expected == 5);

  auto pairs = gen_correspondence(fa, fb, pts, static_cast<int>(pts.size()), 11);
  CHECK(static_cast<int>(pairs.size()) == expected);
  for (const auto& pr : pairs) {
    CHECK_FALSE(blocked(pose_a, pr.source));
    CHECK_FALSE(blocked(pose_b, pr.source));
  }
}
