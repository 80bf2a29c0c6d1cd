#include "spatialforge/visibility.hpp"

#include <algorithm>
#include <cmath>

#include "spatialforge/rng.hpp"

namespace spatialforge {

const char* visibility_name(Visibility v) {
  switch (v) {
    case Visibility::Visible: return "visible";
    case Visibility::OutOfBounds: return "out_of_bounds";
    case Visibility::BehindCamera: return "behind_camera";
    case Visibility::Occluded: return "occluded";
    case Visibility::NoDepth: return "no_depth";
  }
  return "?";
}

VisibilityVerdict check_visibility(const Vec3& p_world, const Pose& world_from_cam,
                                   const CameraModel& cam, const DepthMap& depth,
                                   double rel_tol) {
  VisibilityVerdict out;
  Vec3 p_cam = world_from_cam.inverse().apply(p_world);
  out.z = p_cam.z();

  auto px = project_point(cam, p_cam);
  if (!px) {
    out.status = Visibility::BehindCamera;
    return out;
  }
  out.pixel = *px;

  double u = px->x(), v = px->y();
  if (!(u >= 0.0 && u < cam.width && v >= 0.0 && v < cam.height)) {
    out.status = Visibility::OutOfBounds;
    return out;
  }

  if (depth.empty()) {
    // no depth map: boundary + positive depth is all we can check
    out.status = Visibility::Visible;
    return out;
  }

  int xi = std::clamp(static_cast<int>(std::lround(u)), 0, depth.width - 1);
  int yi = std::clamp(static_cast<int>(std::lround(v)), 0, depth.height - 1);
  double z_depth = depth.at(xi, yi);
  if (!(z_depth > 0.0)) {
    out.status = Visibility::NoDepth;
    return out;
  }

  double rel_gap = std::abs(out.z - z_depth) / out.z;
  out.status = rel_gap > rel_tol ? Visibility::Occluded : Visibility::Visible;
  return out;
}

std::vector<Vec3> sample_instance_points(const std::vector<Vec3>& instance, int n,
                                         uint64_t seed) {
  if (instance.empty()) throw EmptyInstance("sample_instance_points: no points");
  if (n < 1) throw ValidationError("sample_instance_points: n must be >= 1");

  Rng rng(seed);
  std::vector<Vec3> out;
  out.reserve(static_cast<size_t>(n));
  if (static_cast<size_t>(n) <= instance.size()) {
    // partial Fisher-Yates over an index array
    std::vector<size_t> idx(instance.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (int k = 0; k < n; ++k) {
      size_t j = k + static_cast<size_t>(rng.below(idx.size() - k));
      std::swap(idx[k], idx[j]);
      out.push_back(instance[idx[k]]);
    }
  } else {
    for (int k = 0; k < n; ++k)
      out.push_back(instance[static_cast<size_t>(rng.below(instance.size()))]);
  }
  return out;
}

std::vector<PixelPair> gen_correspondence(const FrameGeometry& frame_a,
                                          const FrameGeometry& frame_b,
                                          const std::vector<Vec3>& instance, int n,
                                          uint64_t seed, double rel_tol) {
  static const DepthMap kNoDepth;
  std::vector<Vec3> pts = sample_instance_points(instance, n, seed);
  std::vector<PixelPair> out;
  for (const Vec3& p : pts) {
    auto va = check_visibility(p, frame_a.world_from_cam, frame_a.cam,
                               frame_a.depth ? *frame_a.depth : kNoDepth, rel_tol);
    if (va.status != Visibility::Visible) continue;
    auto vb = check_visibility(p, frame_b.world_from_cam, frame_b.cam,
                               frame_b.depth ? *frame_b.depth : kNoDepth, rel_tol);
    if (vb.status != Visibility::Visible) continue;
    out.push_back({*va.pixel, *vb.pixel, p});
  }
  return out;
}

}  // namespace spatialforge
