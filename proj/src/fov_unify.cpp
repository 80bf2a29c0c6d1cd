#include "spatialforge/fov_unify.hpp"

#include <algorithm>
#include <cmath>

namespace spatialforge {

UnifyResult unify_fov(const CameraModel& cam, double f_new) {
  if (!(f_new > 0.0)) throw InvalidFocal("unify_fov: f_new must be > 0");

  // hfov = 2*atan(W/(2f)); new width = 2*f_new*tan(hfov/2) = f_new * W / f.
  // Going through the fov keeps this in the shape it is defined in.
  double hfov = cam.hfov();
  double vfov = cam.vfov();
  double w_real = 2.0 * f_new * std::tan(0.5 * hfov);
  double h_real = 2.0 * f_new * std::tan(0.5 * vfov);

  UnifyResult r;
  r.new_width = std::max(1, static_cast<int>(std::lround(w_real)));
  r.new_height = std::max(1, static_cast<int>(std::lround(h_real)));
  r.scale_x = static_cast<double>(r.new_width) / cam.width;
  r.scale_y = static_cast<double>(r.new_height) / cam.height;
  r.new_cam = CameraModel(r.new_width, r.new_height, f_new, cam.cx * r.scale_x,
                          cam.cy * r.scale_y);
  return r;
}

namespace {
double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }
}  // namespace

Vec2 rescale_point(const Vec2& p, double sx, double sy, const CameraModel& new_cam) {
  if (!(sx > 0.0 && sy > 0.0)) throw ValidationError("rescale: scales must be > 0");
  return Vec2(clampd(p.x() * sx, 0.0, new_cam.width),
              clampd(p.y() * sy, 0.0, new_cam.height));
}

Box2 rescale_box(const Box2& b, double sx, double sy, const CameraModel& new_cam) {
  Vec2 p1 = rescale_point(Vec2(b.x1, b.y1), sx, sy, new_cam);
  Vec2 p2 = rescale_point(Vec2(b.x2, b.y2), sx, sy, new_cam);
  return Box2{p1.x(), p1.y(), p2.x(), p2.y()};
}

std::vector<Vec2> rescale_points(const std::vector<Vec2>& pts, double sx, double sy,
                                 const CameraModel& new_cam) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(rescale_point(p, sx, sy, new_cam));
  return out;
}

std::vector<Box2> rescale_boxes(const std::vector<Box2>& boxes, double sx, double sy,
                               const CameraModel& new_cam) {
  std::vector<Box2> out;
  out.reserve(boxes.size());
  for (const auto& b : boxes) out.push_back(rescale_box(b, sx, sy, new_cam));
  return out;
}

}  // namespace spatialforge
