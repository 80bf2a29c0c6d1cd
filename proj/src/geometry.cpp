#include "spatialforge/geometry.hpp"

#include <cmath>
#include <cstdio>

namespace spatialforge {

namespace {
constexpr double kPi = 3.14159265358979323846;

Mat3 rot_x(double a) {
  double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}

Mat3 rot_y(double a) {
  double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}

Mat3 rot_z(double a) {
  double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}
}  // namespace

CameraModel::CameraModel(int w, int h, double f, double cx_, double cy_)
    : width(w), height(h), focal(f), cx(cx_), cy(cy_) {
  if (w < 1 || h < 1) throw ValidationError("camera dimensions must be >= 1");
  if (!(f > 0.0)) throw InvalidFocal("focal length must be > 0");
}

CameraModel CameraModel::from_hfov_deg(int w, int h, double hfov_deg) {
  if (!(hfov_deg > 0.0 && hfov_deg < 180.0))
    throw ValidationError("hfov must be in (0, 180) degrees");
  double f = w / (2.0 * std::tan(0.5 * hfov_deg * kPi / 180.0));
  return CameraModel(w, h, f);
}

double CameraModel::hfov() const { return 2.0 * std::atan(width / (2.0 * focal)); }
double CameraModel::vfov() const { return 2.0 * std::atan(height / (2.0 * focal)); }
double CameraModel::hfov_deg() const { return hfov() * 180.0 / kPi; }
double CameraModel::vfov_deg() const { return vfov() * 180.0 / kPi; }

bool Pose::is_rigid(double tol) const {
  Mat3 rtr = rotation.transpose() * rotation;
  return (rtr - Mat3::Identity()).norm() <= tol &&
         std::abs(rotation.determinant() - 1.0) <= tol;
}

Pose Pose::validated(const Mat3& r, const Vec3& t, double tol) {
  Pose p{r, t};
  if (!p.is_rigid(tol))
    throw ValidationError("rotation is not orthonormal with det +1");
  return p;
}

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

Pose Pose::compose(const Pose& inner) const {
  Pose out;
  out.rotation = rotation * inner.rotation;
  out.translation = rotation * inner.translation + translation;
  return out;
}

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quaternion Quaternion::normalized() const {
  double n = norm();
  return {w / n, x / n, y / n, z / n};
}

Mat3 euler_to_matrix(const EulerAngles& a) {
  return rot_x(a.pitch * kPi) * rot_y(a.yaw * kPi) * rot_z(a.roll * kPi);
}

// For R = Rx(p) Ry(y) Rz(r):
//   R(0,2) = sin y
//   R(1,2) = -sin p cos y     R(2,2) = cos p cos y
//   R(0,1) = -cos y sin r     R(0,0) = cos y cos r
// The middle (yaw) angle saturating at +-90deg collapses pitch and roll onto
// one axis; canonical branch: roll = 0, pitch = atan2(R10, R11).
EulerDecomposition matrix_to_euler(const Mat3& rot) {
  EulerDecomposition out;
  double sy = rot(0, 2);
  if (sy > 1.0) sy = 1.0;
  if (sy < -1.0) sy = -1.0;
  double yaw = std::asin(sy);

  // 1e-6 in normalized units corresponds to |sin(yaw)| within ~cos eps of 1
  double lock_margin = std::abs(std::abs(yaw) / kPi - 0.5);
  if (lock_margin < 1e-6) {
    // At yaw = +90: Rx(p)Ry(90)Rz(r) = Rx(p+r)Ry(90) and row1 = (sin q, cos q, 0)
    // with q = p+r. At yaw = -90 the collapsed angle is p-r and row1 carries -q.
    out.gimbal_lock = true;
    out.angles.yaw = (sy > 0) ? 0.5 : -0.5;
    out.angles.roll = 0.0;
    double q = std::atan2(rot(1, 0), rot(1, 1));
    out.angles.pitch = (sy > 0 ? q : -q) / kPi;
    return out;
  }

  out.angles.yaw = yaw / kPi;
  out.angles.pitch = std::atan2(-rot(1, 2), rot(2, 2)) / kPi;
  out.angles.roll = std::atan2(-rot(0, 1), rot(0, 0)) / kPi;
  return out;
}

Quaternion euler_to_quaternion(const EulerAngles& a) {
  auto axis_quat = [](double half, int axis) {
    Quaternion q;
    q.w = std::cos(half);
    double s = std::sin(half);
    if (axis == 0) q.x = s;
    if (axis == 1) q.y = s;
    if (axis == 2) q.z = s;
    return q;
  };
  auto mul = [](const Quaternion& a, const Quaternion& b) {
    Quaternion q;
    q.w = a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z;
    q.x = a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y;
    q.y = a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x;
    q.z = a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w;
    return q;
  };
  Quaternion q = mul(mul(axis_quat(0.5 * a.pitch * kPi, 0),
                         axis_quat(0.5 * a.yaw * kPi, 1)),
                     axis_quat(0.5 * a.roll * kPi, 2));
  return q.normalized();
}

Mat3 quaternion_to_matrix(const Quaternion& qin) {
  Quaternion q = qin.normalized();
  Mat3 m;
  m << 1 - 2 * (q.y * q.y + q.z * q.z), 2 * (q.x * q.y - q.w * q.z),
      2 * (q.x * q.z + q.w * q.y),  //
      2 * (q.x * q.y + q.w * q.z), 1 - 2 * (q.x * q.x + q.z * q.z),
      2 * (q.y * q.z - q.w * q.x),  //
      2 * (q.x * q.z - q.w * q.y), 2 * (q.y * q.z + q.w * q.x),
      1 - 2 * (q.x * q.x + q.y * q.y);
  return m;
}

Box3D transform_box(const Box3D& box, const Pose& pose) {
  Box3D out = box;
  out.center = pose.apply(box.center);
  out.angles = matrix_to_euler(pose.rotation * euler_to_matrix(box.angles)).angles;
  return out;
}

std::optional<Vec2> project_point(const CameraModel& cam, const Vec3& p) {
  if (!(p.z() > 0.0)) return std::nullopt;
  return Vec2(cam.focal * p.x() / p.z() + cam.cx,
              cam.focal * p.y() / p.z() + cam.cy);
}

Vec3 unproject_pixel(const CameraModel& cam, double u, double v, double depth) {
  if (!(depth > 0.0)) throw NonPositiveDepth("unproject_pixel: depth must be > 0");
  return Vec3((u - cam.cx) * depth / cam.focal, (v - cam.cy) * depth / cam.focal,
              depth);
}

std::array<Vec3, 8> box_corners(const Box3D& box) {
  // Local sign pattern: -y face then +y face, each (-x,-z),(+x,-z),(+x,+z),(-x,+z)
  static constexpr double kS[8][3] = {
      {-1, -1, -1}, {+1, -1, -1}, {+1, -1, +1}, {-1, -1, +1},
      {-1, +1, -1}, {+1, +1, -1}, {+1, +1, +1}, {-1, +1, +1},
  };
  Mat3 r = euler_to_matrix(box.angles);
  std::array<Vec3, 8> out;
  for (int i = 0; i < 8; ++i) {
    Vec3 local(0.5 * kS[i][0] * box.size.x(), 0.5 * kS[i][1] * box.size.y(),
               0.5 * kS[i][2] * box.size.z());
    out[i] = box.center + r * local;
  }
  return out;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string format2(double v) {
  double r = round2(v);
  if (r == 0.0) r = 0.0;  // drop the sign of -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", r);
  return buf;
}

}  // namespace spatialforge
