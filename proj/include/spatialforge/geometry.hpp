#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>

#include "spatialforge/errors.hpp"

namespace spatialforge {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

// Camera convention used everywhere: X right, Y down, Z forward (right-handed,
// origin at the camera center). Pixels: u grows with +X, v grows with +Y.

/// Pinhole intrinsics with square pixels and no distortion. The principal
/// point defaults to the exact image center.
struct CameraModel {
  int width = 0;
  int height = 0;
  double focal = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  CameraModel() = default;
  CameraModel(int w, int h, double f)
      : CameraModel(w, h, f, 0.5 * w, 0.5 * h) {}
  CameraModel(int w, int h, double f, double cx_, double cy_);

  static CameraModel from_hfov_deg(int w, int h, double hfov_deg);

  double hfov() const;  // radians, strictly in (0, pi)
  double vfov() const;
  double hfov_deg() const;
  double vfov_deg() const;
};

/// Rigid transform: rotation must be orthonormal with det +1 (checked within
/// 1e-6 at construction time via `validated`). Whether it maps camera->world
/// or world->camera is stated at each use site.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }
  static Pose validated(const Mat3& r, const Vec3& t, double tol = 1e-6);

  bool is_rigid(double tol = 1e-6) const;

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Pose inverse() const;
  /// this ∘ inner: (this.compose(inner)).apply(p) == this.apply(inner.apply(p))
  Pose compose(const Pose& inner) const;
};

/// Rotation angles normalized by 180deg: stored value * 180 = degrees, each
/// component in [-1, 1]. Order of application is intrinsic X (pitch), then
/// Y (yaw), then Z (roll).
struct EulerAngles {
  double pitch = 0.0;
  double yaw = 0.0;
  double roll = 0.0;

  double pitch_deg() const { return pitch * 180.0; }
  double yaw_deg() const { return yaw * 180.0; }
  double roll_deg() const { return roll * 180.0; }

  static EulerAngles from_degrees(double p, double y, double r) {
    return {p / 180.0, y / 180.0, r / 180.0};
  }
};

struct Quaternion {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  double norm() const;
  Quaternion normalized() const;
};

/// 9-DoF oriented box in camera coordinates. Size components are the box
/// extents along its local axes when the rotation is zero (x_l front-back,
/// y_l vertical, z_l lateral). Sizes must be strictly positive.
struct Box3D {
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Ones();
  EulerAngles angles;
  std::string label;

  double volume() const { return size.x() * size.y() * size.z(); }
};

// ---------------------------------------------------------------------------
// Rotation conversions

Mat3 euler_to_matrix(const EulerAngles& a);

/// Result of decomposing a rotation matrix. When the middle (yaw) angle is
/// within 1e-6 of +-90deg the decomposition is singular; `gimbal_lock` is set
/// and the canonical branch puts the full residual rotation in pitch with
/// roll = 0.
struct EulerDecomposition {
  EulerAngles angles;
  bool gimbal_lock = false;
};

EulerDecomposition matrix_to_euler(const Mat3& rot);

Quaternion euler_to_quaternion(const EulerAngles& a);
Mat3 quaternion_to_matrix(const Quaternion& q);

// ---------------------------------------------------------------------------
// Box and projection operations

/// Rigidly re-expresses `box` through `pose` (pose maps the box's current
/// frame into the target frame). Size is preserved; angles are recomputed
/// from the composed rotation using the canonical gimbal-lock branch.
Box3D transform_box(const Box3D& box, const Pose& pose);

/// Pinhole projection. Returns nullopt when the point is not strictly in
/// front of the camera (z <= 0); that is an ordinary outcome, not an error.
std::optional<Vec2> project_point(const CameraModel& cam, const Vec3& p);

/// Inverse projection at a given positive depth. Throws NonPositiveDepth.
Vec3 unproject_pixel(const CameraModel& cam, double u, double v, double depth);

/// The 8 corners, fixed order: the four corners of the -y face first then the
/// +y face, each in (-x,-z), (+x,-z), (+x,+z), (-x,+z) order of local signs.
/// Centroid of the corners equals the box center.
std::array<Vec3, 8> box_corners(const Box3D& box);

// ---------------------------------------------------------------------------
// Serialization helpers (geometry math never rounds; only emitted text does)

/// Round to two decimals, half away from zero.
double round2(double v);

/// Fixed two-decimal formatting ("0.40", "-0.16"); negative zero normalizes
/// to "0.00".
std::string format2(double v);

}  // namespace spatialforge
