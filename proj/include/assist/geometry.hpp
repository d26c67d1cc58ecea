#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <string_view>

#include "assist/config.hpp"

namespace assist {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Table is the fiducial frame: the marker lies at its origin and the table
// surface is its z = 0 plane with +z pointing up. Object is the body frame of
// a scene object (origin at the footprint center, on the table).
enum class FrameId { Camera, Table, RobotBase, Gripper, Object };

std::string_view to_string(FrameId frame);
FrameId frame_from_string(std::string_view name);

// Pose of `child` expressed in `parent`: apply() maps child coordinates into
// parent coordinates. The rotation is stored as a unit quaternion and is
// renormalized on every construction.
class RigidTransform {
 public:
  RigidTransform(FrameId parent, FrameId child, const Quat& rotation, const Vec3& translation);

  static RigidTransform identity(FrameId frame);
  static RigidTransform from_matrix(FrameId parent, FrameId child, const Mat3& rotation,
                                    const Vec3& translation);
  // Rotation about +z by `yaw` followed by translation.
  static RigidTransform from_yaw(FrameId parent, FrameId child, double yaw, const Vec3& translation);

  FrameId parent() const { return parent_; }
  FrameId child() const { return child_; }
  const Quat& rotation() const { return rotation_; }
  Mat3 rotation_matrix() const { return rotation_.toRotationMatrix(); }
  const Vec3& translation() const { return translation_; }

  Vec3 apply(const Vec3& point) const { return rotation_ * point + translation_; }
  Vec3 rotate(const Vec3& vector) const { return rotation_ * vector; }

  RigidTransform inverse() const;
  // Same pose, different frame tags. Used when a value crosses a boundary whose
  // frame convention is fixed by the caller (e.g. config-loaded transforms).
  RigidTransform retagged(FrameId parent, FrameId child) const;

 private:
  FrameId parent_;
  FrameId child_;
  Quat rotation_;
  Vec3 translation_;
};

// a: P <- M, b: M <- C  gives  P <- C. Throws FrameMismatch unless
// a.child() == b.parent().
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);

// Angle of the relative rotation a^-1 b (radians, in [0, pi]).
double rotation_angle_between(const Quat& a, const Quat& b);
// Rotation angle of `t` itself.
double rotation_angle(const RigidTransform& t);

// Wraps an angle into (-pi/2, pi/2]; the canonical interval for undirected
// axes such as grasp closing axes and box yaw.
double wrap_half_pi(double angle);
double wrap_pi(double angle);

class PinholeCamera {
 public:
  PinholeCamera(double fx, double fy, double cx, double cy, int width, int height);

  static PinholeCamera from_config(const KeyValueConfig& config);

  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  int width() const { return width_; }
  int height() const { return height_; }

  // Pixel (u, v) covers the continuous range [u - 0.5, u + 0.5); pixel centers
  // sit on integer coordinates.
  bool contains(const Vec2& pixel) const;
  Vec2 center() const { return {cx_, cy_}; }

  Vec2 project(const Vec3& point_camera) const;
  Vec3 backproject(const Vec2& pixel, double depth) const;
  // Direction with unit z through `pixel` (so ray parameter equals depth).
  Vec3 ray(const Vec2& pixel) const;

 private:
  double fx_, fy_, cx_, cy_;
  int width_, height_;
};

// Fiducial corners in the Table frame for a square marker of side `side`
// centered at the origin, in ArUco order: top-left, top-right, bottom-right,
// bottom-left as seen from +z with +x right and +y up.
std::array<Vec3, 4> fiducial_corners(double side);

// Camera <- Table pose from the four detected marker corners (same order as
// fiducial_corners). Homography initialization followed by Levenberg-Marquardt
// refinement of the corner reprojection error.
RigidTransform estimate_fiducial_pose(const std::array<Vec2, 4>& corners, double marker_side,
                                      const PinholeCamera& camera);

// Root-mean-square reprojection error of the marker corners under `camera_from_table`.
double fiducial_reprojection_rms(const std::array<Vec2, 4>& corners, double marker_side,
                                 const PinholeCamera& camera,
                                 const RigidTransform& camera_from_table);

// Loads `prefix.translation` (meters) and `prefix.rpy` (radians, fixed-axis
// roll/pitch/yaw) from config.
RigidTransform transform_from_config(const KeyValueConfig& config, const std::string& prefix,
                                     FrameId parent, FrameId child);

// Camera <- Table pose for a camera at `eye` (Table frame) looking at `target`,
// image x axis kept horizontal.
RigidTransform look_at(const Vec3& eye, const Vec3& target);

Mat3 rpy_to_matrix(double roll, double pitch, double yaw);

// Box resting in the Table frame, rotated by `yaw` about the table normal.
struct Box3D {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Ones();
  double yaw = 0.0;

  // Horizontal axes of the box in the Table frame.
  Vec2 axis_x() const { return {std::cos(yaw), std::sin(yaw)}; }
  Vec2 axis_y() const { return {-std::sin(yaw), std::cos(yaw)}; }
  double top() const { return center.z() + half_extents.z(); }
  double volume() const { return 8.0 * half_extents.prod(); }
  // Point expressed in the box's own axes, relative to its center.
  Vec3 to_local(const Vec3& p) const;
  bool contains(const Vec3& p, double tolerance = 0.0) const;
};

// Axis-aligned rectangle in the table plane.
struct Rect2 {
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;

  bool contains(const Vec2& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
  double width() const { return x_max - x_min; }
  double depth() const { return y_max - y_min; }
  Vec2 center() const { return {(x_min + x_max) / 2, (y_min + y_max) / 2}; }
};

}  // namespace assist
