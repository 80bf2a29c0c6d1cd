#pragma once

#include <vector>

#include "spatialforge/geometry.hpp"

namespace spatialforge {

/// Axis-aligned pixel rectangle (x1,y1)-(x2,y2), x1<=x2, y1<=y2.
struct Box2 {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

/// Geometry of re-imaging a frame at a shared focal length. Only the image
/// and 2D pixel annotations rescale; 3D boxes are untouched. Pixel resampling
/// itself is the caller's job (the CLI wires one in for depth maps).
struct UnifyResult {
  int new_width = 0;
  int new_height = 0;
  double scale_x = 1.0;  // new_width / old width
  double scale_y = 1.0;
  CameraModel new_cam;
};

/// Virtual re-imaging at focal length f_new: the field of view is preserved
/// and the pixel dimensions become 2*f_new*tan(fov/2), rounded to the nearest
/// integer (minimum 1). Throws InvalidFocal when f_new <= 0.
UnifyResult unify_fov(const CameraModel& cam, double f_new);

Vec2 rescale_point(const Vec2& p, double sx, double sy, const CameraModel& new_cam);
Box2 rescale_box(const Box2& b, double sx, double sy, const CameraModel& new_cam);

std::vector<Vec2> rescale_points(const std::vector<Vec2>& pts, double sx, double sy,
                                 const CameraModel& new_cam);
std::vector<Box2> rescale_boxes(const std::vector<Box2>& boxes, double sx, double sy,
                                const CameraModel& new_cam);

}  // namespace spatialforge
