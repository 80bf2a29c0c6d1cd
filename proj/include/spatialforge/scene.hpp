#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spatialforge/fov_unify.hpp"
#include "spatialforge/geometry.hpp"
#include "spatialforge/visibility.hpp"

namespace spatialforge {

/// 2D reference handles for one object, keyed by frame index.
struct ObjectRefs {
  std::map<int, Box2> box2d;
  std::map<int, Vec2> point2d;  // mask centers
  std::optional<int> marker_id;  // visual-prompt marker
};

struct SceneObject {
  std::string label;
  Box3D box;  // frame-1 camera coordinates once normalized
  std::vector<bool> in_frames;  // length = frame count, at least one true
  ObjectRefs refs;
  std::vector<Vec3> points;  // instance surface samples, same coordinates as box
  bool axis_aligned_source = false;
  std::optional<int> appearance_frame;

  int first_appearance() const {
    if (appearance_frame) return *appearance_frame;
    for (size_t i = 0; i < in_frames.size(); ++i)
      if (in_frames[i]) return static_cast<int>(i);
    return -1;
  }
};

struct Frame {
  std::string image;  // reference path, never loaded here
  CameraModel cam;
  Pose world_from_cam;  // after normalize: frame-1-from-this-camera
  std::string depth_path;
  DepthMap depth;  // empty when no depth is attached
  std::optional<int> time_index;
};

/// One or more frames plus objects, everything in the first frame's camera
/// coordinate system after normalize().
struct ScenePack {
  std::string id;
  std::string source;
  std::vector<Frame> frames;
  std::vector<SceneObject> objects;
  bool fov_unified = false;
  double f_new = 0.0;
  std::optional<double> fps;

  bool multi_frame() const { return frames.size() > 1; }
};

}  // namespace spatialforge
