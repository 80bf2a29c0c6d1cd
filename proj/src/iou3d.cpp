#include "spatialforge/iou3d.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace spatialforge {

namespace {

constexpr double kPlaneEps = 1e-9;

struct Plane {
  Vec3 n;    // outward unit normal
  double d;  // n.x <= d inside
};

using Polygon = std::vector<Vec3>;

// Six outward face planes of a box.
std::array<Plane, 6> box_planes(const Box3D& b) {
  Mat3 r = euler_to_matrix(b.angles);
  std::array<Plane, 6> out;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 n = r.col(axis);
    double half = 0.5 * b.size[axis];
    out[2 * axis] = Plane{n, n.dot(b.center) + half};
    out[2 * axis + 1] = Plane{-n, -n.dot(b.center) + half};
  }
  return out;
}

// Quad faces of a box, outward-oriented (orientation is irrelevant to the
// volume routine below, which fans from an interior point with |det|).
std::vector<Polygon> box_faces(const Box3D& b) {
  auto c = box_corners(b);
  // corner order: 0..3 on the -y face, 4..7 on the +y face
  static constexpr int kF[6][4] = {
      {0, 1, 2, 3},  // -y
      {7, 6, 5, 4},  // +y
      {0, 3, 7, 4},  // -x
      {1, 5, 6, 2},  // +x
      {0, 4, 5, 1},  // -z
      {3, 2, 6, 7},  // +z
  };
  std::vector<Polygon> faces(6);
  for (int f = 0; f < 6; ++f)
    for (int k = 0; k < 4; ++k) faces[f].push_back(c[kF[f][k]]);
  return faces;
}

// Sutherland-Hodgman against one half-space (n.x <= d). Crossing points are
// appended to `section` so the caller can rebuild the cap polygon.
Polygon clip_polygon(const Polygon& poly, const Plane& pl, std::vector<Vec3>& section) {
  Polygon out;
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec3& cur = poly[i];
    const Vec3& nxt = poly[(i + 1) % n];
    double dc = pl.n.dot(cur) - pl.d;
    double dn = pl.n.dot(nxt) - pl.d;
    bool cur_in = dc <= kPlaneEps;
    bool nxt_in = dn <= kPlaneEps;
    if (cur_in) out.push_back(cur);
    if (cur_in != nxt_in) {
      double t = dc / (dc - dn);
      Vec3 hit = cur + t * (nxt - cur);
      out.push_back(hit);
      section.push_back(hit);
    }
  }
  return out;
}

// Order the section points around their centroid within the plane and emit
// the cap polygon. Points closer than kPlaneEps are merged first.
Polygon build_cap(std::vector<Vec3> pts, const Plane& pl) {
  std::vector<Vec3> uniq;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : uniq)
      if ((p - q).squaredNorm() < 1e-16) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(p);
  }
  if (uniq.size() < 3) return {};

  Vec3 centroid = Vec3::Zero();
  for (const auto& p : uniq) centroid += p;
  centroid /= static_cast<double>(uniq.size());

  // In-plane basis
  Vec3 u = (std::abs(pl.n.x()) < 0.9) ? Vec3::UnitX().cross(pl.n).normalized()
                                      : Vec3::UnitY().cross(pl.n).normalized();
  Vec3 v = pl.n.cross(u);

  std::sort(uniq.begin(), uniq.end(), [&](const Vec3& a, const Vec3& b) {
    Vec3 da = a - centroid, db = b - centroid;
    return std::atan2(da.dot(v), da.dot(u)) < std::atan2(db.dot(v), db.dot(u));
  });
  return uniq;
}

// Volume of a convex polytope given its (convex) faces: fan every face from
// the vertex centroid, which lies inside, and sum |tetrahedron| volumes.
double polytope_volume(const std::vector<Polygon>& faces) {
  Vec3 centroid = Vec3::Zero();
  size_t count = 0;
  for (const auto& f : faces)
    for (const auto& p : f) {
      centroid += p;
      ++count;
    }
  if (count == 0) return 0.0;
  centroid /= static_cast<double>(count);

  double vol = 0.0;
  for (const auto& f : faces) {
    for (size_t i = 1; i + 1 < f.size(); ++i) {
      Vec3 a = f[0] - centroid;
      Vec3 b = f[i] - centroid;
      Vec3 c = f[i + 1] - centroid;
      vol += std::abs(a.dot(b.cross(c)));
    }
  }
  return vol / 6.0;
}

// Strict ordering on the geometric fields, used to canonicalize the clip
// direction so iou3d is bitwise symmetric.
bool box_less(const Box3D& a, const Box3D& b) {
  for (int i = 0; i < 3; ++i)
    if (a.center[i] != b.center[i]) return a.center[i] < b.center[i];
  for (int i = 0; i < 3; ++i)
    if (a.size[i] != b.size[i]) return a.size[i] < b.size[i];
  if (a.angles.pitch != b.angles.pitch) return a.angles.pitch < b.angles.pitch;
  if (a.angles.yaw != b.angles.yaw) return a.angles.yaw < b.angles.yaw;
  return a.angles.roll < b.angles.roll;
}

}  // namespace

double intersection_volume(const Box3D& a, const Box3D& b) {
  // bounding-sphere gate: boxes cannot meet beyond their half-diagonals
  double reach = 0.5 * (a.size.norm() + b.size.norm());
  if ((a.center - b.center).squaredNorm() > reach * reach) return 0.0;

  std::vector<Polygon> faces = box_faces(a);
  for (const Plane& pl : box_planes(b)) {
    std::vector<Polygon> next;
    std::vector<Vec3> section;
    for (const auto& poly : faces) {
      Polygon clipped = clip_polygon(poly, pl, section);
      if (clipped.size() >= 3) next.push_back(std::move(clipped));
    }
    Polygon cap = build_cap(std::move(section), pl);
    if (cap.size() >= 3) next.push_back(std::move(cap));
    faces = std::move(next);
    if (faces.empty()) return 0.0;
  }
  return polytope_volume(faces);
}

double iou3d(const Box3D& a, const Box3D& b) {
  for (int i = 0; i < 3; ++i)
    if (a.size[i] < 1e-9 || b.size[i] < 1e-9)
      throw DegenerateBox("iou3d: box size component below 1e-9");

  if (a.center == b.center && a.size == b.size &&
      a.angles.pitch == b.angles.pitch && a.angles.yaw == b.angles.yaw &&
      a.angles.roll == b.angles.roll)
    return 1.0;

  bool swap = box_less(b, a);
  double inter = intersection_volume(swap ? b : a, swap ? a : b);
  double uni = a.volume() + b.volume() - inter;
  if (!(uni > 0.0)) return 0.0;
  double iou = inter / uni;
  return std::clamp(iou, 0.0, 1.0);
}

}  // namespace spatialforge
