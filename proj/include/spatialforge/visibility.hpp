#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spatialforge/geometry.hpp"

namespace spatialforge {

/// Per-pixel depth in meters; values <= 0 mark invalid pixels. Dimensions
/// must match the paired CameraModel.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  bool empty() const { return values.empty(); }
  float at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
  float& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }

  static DepthMap filled(int w, int h, float v) {
    DepthMap d;
    d.width = w;
    d.height = h;
    d.values.assign(static_cast<size_t>(w) * h, v);
    return d;
  }
};

enum class Visibility { Visible, OutOfBounds, BehindCamera, Occluded, NoDepth };

const char* visibility_name(Visibility v);

struct VisibilityVerdict {
  Visibility status = Visibility::BehindCamera;
  std::optional<Vec2> pixel;         // set whenever the point projects (z > 0)
  double z = 0.0;                    // depth in the camera frame
};

/// The three-criterion visibility test, applied in order: positive depth,
/// image bounds (0 <= u < W, 0 <= v < H), then occlusion against the depth
/// map with relative tolerance |z - z_depth| / z > rel_tol. Invalid depth
/// pixels yield NoDepth. Depth lookup is nearest-neighbor. `world_from_cam`
/// is the frame's pose (its inverse maps the point into the camera).
VisibilityVerdict check_visibility(const Vec3& p_world, const Pose& world_from_cam,
                                   const CameraModel& cam, const DepthMap& depth,
                                   double rel_tol = 0.05);

/// Seeded point sampling: without replacement when the instance has at least
/// n points, with replacement otherwise. Throws EmptyInstance.
std::vector<Vec3> sample_instance_points(const std::vector<Vec3>& instance, int n,
                                         uint64_t seed);

struct FrameGeometry {
  Pose world_from_cam;
  CameraModel cam;
  const DepthMap* depth = nullptr;
};

struct PixelPair {
  Vec2 a, b;
  Vec3 source;  // shared 3D point
};

/// Correspondence pairs: n points sampled from the instance, kept only when
/// Visible in both frames.
std::vector<PixelPair> gen_correspondence(const FrameGeometry& frame_a,
                                          const FrameGeometry& frame_b,
                                          const std::vector<Vec3>& instance, int n,
                                          uint64_t seed, double rel_tol = 0.05);

}  // namespace spatialforge
