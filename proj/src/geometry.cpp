#include "assist/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "assist/error.hpp"

namespace assist {

std::string_view to_string(FrameId frame) {
  switch (frame) {
    case FrameId::Camera: return "camera";
    case FrameId::Table: return "table";
    case FrameId::RobotBase: return "robot_base";
    case FrameId::Gripper: return "gripper";
    case FrameId::Object: return "object";
  }
  return "unknown";
}

FrameId frame_from_string(std::string_view name) {
  for (FrameId f : {FrameId::Camera, FrameId::Table, FrameId::RobotBase, FrameId::Gripper,
                    FrameId::Object}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::ParseError, "unknown frame '" + std::string(name) + "'");
}

RigidTransform::RigidTransform(FrameId parent, FrameId child, const Quat& rotation,
                               const Vec3& translation)
    : parent_(parent), child_(child), rotation_(rotation), translation_(translation) {
  const double norm = rotation_.norm();
  if (!std::isfinite(norm) || norm < 1e-12 || !translation_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "non-finite or zero rotation/translation");
  }
  if (norm != 1.0) rotation_.coeffs() /= norm;
}

RigidTransform RigidTransform::identity(FrameId frame) {
  return {frame, frame, Quat::Identity(), Vec3::Zero()};
}

RigidTransform RigidTransform::from_matrix(FrameId parent, FrameId child, const Mat3& rotation,
                                           const Vec3& translation) {
  return {parent, child, Quat(rotation), translation};
}

RigidTransform RigidTransform::from_yaw(FrameId parent, FrameId child, double yaw,
                                        const Vec3& translation) {
  return {parent, child, Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())), translation};
}

RigidTransform RigidTransform::inverse() const {
  const Quat inv = rotation_.conjugate();
  return {child_, parent_, inv, -(inv * translation_)};
}

RigidTransform RigidTransform::retagged(FrameId parent, FrameId child) const {
  return {parent, child, rotation_, translation_};
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  if (a.child() != b.parent()) {
    throw Error(ErrorCode::FrameMismatch,
                std::string(to_string(a.parent())) + "<-" + std::string(to_string(a.child())) +
                    " cannot compose with " + std::string(to_string(b.parent())) + "<-" +
                    std::string(to_string(b.child())));
  }
  return {a.parent(), b.child(), a.rotation() * b.rotation(),
          a.rotation() * b.translation() + a.translation()};
}

RigidTransform invert(const RigidTransform& t) { return t.inverse(); }

double rotation_angle_between(const Quat& a, const Quat& b) {
  // 2*atan2 form stays accurate near zero where acos loses precision.
  const Quat rel = a.conjugate() * b;
  return 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
}

double rotation_angle(const RigidTransform& t) {
  return rotation_angle_between(Quat::Identity(), t.rotation());
}

double wrap_pi(double angle) {
  double a = std::fmod(angle + M_PI, 2.0 * M_PI);
  if (a < 0) a += 2.0 * M_PI;
  return a - M_PI;
}

double wrap_half_pi(double angle) {
  double a = std::fmod(angle, M_PI);
  if (a <= -M_PI / 2) a += M_PI;
  if (a > M_PI / 2) a -= M_PI;
  return a;
}

// ---------------------------------------------------------------------------

PinholeCamera::PinholeCamera(double fx, double fy, double cx, double cy, int width, int height)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height) {
  if (!(fx > 0) || !(fy > 0) || width <= 0 || height <= 0 || !(cx >= 0) || !(cx < width) ||
      !(cy >= 0) || !(cy < height)) {
    throw Error(ErrorCode::InvalidArgument, "invalid pinhole intrinsics");
  }
}

PinholeCamera PinholeCamera::from_config(const KeyValueConfig& config) {
  return {config.get_double("camera.fx"), config.get_double("camera.fy"),
          config.get_double("camera.cx"), config.get_double("camera.cy"),
          static_cast<int>(config.get_int("camera.width")),
          static_cast<int>(config.get_int("camera.height"))};
}

bool PinholeCamera::contains(const Vec2& pixel) const {
  return pixel.x() >= -0.5 && pixel.x() < width_ - 0.5 && pixel.y() >= -0.5 &&
         pixel.y() < height_ - 0.5;
}

Vec2 PinholeCamera::project(const Vec3& p) const {
  if (!(p.z() > 0) || !p.allFinite()) {
    throw Error(ErrorCode::BehindCamera, "point not in front of camera");
  }
  return {fx_ * p.x() / p.z() + cx_, fy_ * p.y() / p.z() + cy_};
}

Vec3 PinholeCamera::backproject(const Vec2& pixel, double depth) const {
  if (!std::isfinite(depth) || depth <= 0) {
    throw Error(ErrorCode::InvalidDepth, "depth must be positive and finite");
  }
  if (!contains(pixel)) throw Error(ErrorCode::InvalidArgument, "pixel outside image");
  return {(pixel.x() - cx_) * depth / fx_, (pixel.y() - cy_) * depth / fy_, depth};
}

Vec3 PinholeCamera::ray(const Vec2& pixel) const {
  return {(pixel.x() - cx_) / fx_, (pixel.y() - cy_) / fy_, 1.0};
}

// ---------------------------------------------------------------------------

std::array<Vec3, 4> fiducial_corners(double side) {
  const double h = side / 2;
  return {Vec3(-h, h, 0), Vec3(h, h, 0), Vec3(h, -h, 0), Vec3(-h, -h, 0)};
}

namespace {

double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a;
  const Vec2 ac = c - a;
  return 0.5 * std::abs(ab.x() * ac.y() - ab.y() * ac.x());
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

// Homography from marker-plane (x, y) to normalized image coordinates.
Mat3 plane_homography(const std::array<Vec3, 4>& object, const std::array<Vec2, 4>& image) {
  Eigen::Matrix<double, 8, 9> a = Eigen::Matrix<double, 8, 9>::Zero();
  for (int i = 0; i < 4; ++i) {
    const double x = object[i].x(), y = object[i].y();
    const double u = image[i].x(), v = image[i].y();
    a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y, -u;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y, -v;
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Mat3 hm;
  hm << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return hm;
}

}  // namespace

double fiducial_reprojection_rms(const std::array<Vec2, 4>& corners, double marker_side,
                                 const PinholeCamera& camera,
                                 const RigidTransform& camera_from_table) {
  const auto object = fiducial_corners(marker_side);
  double sum = 0;
  for (int i = 0; i < 4; ++i) {
    sum += (camera.project(camera_from_table.apply(object[i])) - corners[i]).squaredNorm();
  }
  return std::sqrt(sum / 4);
}

RigidTransform estimate_fiducial_pose(const std::array<Vec2, 4>& corners, double marker_side,
                                      const PinholeCamera& camera) {
  if (!(marker_side > 0)) throw Error(ErrorCode::InvalidArgument, "marker side must be positive");
  for (const auto& c : corners) {
    if (!c.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite corner");
  }
  // Any three collinear corners make the homography rank-deficient.
  double scale = 0;
  for (int i = 0; i < 4; ++i) scale = std::max(scale, (corners[i] - corners[(i + 1) % 4]).norm());
  const double min_area = 1e-6 * scale * scale + 1e-12;
  for (int i = 0; i < 4; ++i) {
    if (triangle_area(corners[i], corners[(i + 1) % 4], corners[(i + 2) % 4]) <= min_area) {
      throw Error(ErrorCode::DegenerateConfiguration, "marker corners are collinear");
    }
  }

  const auto object = fiducial_corners(marker_side);
  std::array<Vec2, 4> normalized;
  for (int i = 0; i < 4; ++i) {
    normalized[i] = {(corners[i].x() - camera.cx()) / camera.fx(),
                     (corners[i].y() - camera.cy()) / camera.fy()};
  }

  // H ~ [r1 r2 t] for points on the z = 0 plane.
  Mat3 h = plane_homography(object, normalized);
  const double lambda = 2.0 / (h.col(0).norm() + h.col(1).norm());
  h *= lambda;
  if (h(2, 2) < 0) h = -h;
  Mat3 r0;
  r0.col(0) = h.col(0);
  r0.col(1) = h.col(1);
  r0.col(2) = h.col(0).cross(h.col(1));
  Mat3 rotation = nearest_rotation(r0);
  Vec3 translation = h.col(2);

  auto residuals = [&](const Mat3& r, const Vec3& t, Eigen::Matrix<double, 8, 1>& out) {
    for (int i = 0; i < 4; ++i) {
      const Vec3 p = r * object[i] + t;
      if (p.z() <= 0) return false;
      out(2 * i) = camera.fx() * p.x() / p.z() + camera.cx() - corners[i].x();
      out(2 * i + 1) = camera.fy() * p.y() / p.z() + camera.cy() - corners[i].y();
    }
    return true;
  };

  Eigen::Matrix<double, 8, 1> res;
  if (!residuals(rotation, translation, res)) {
    throw Error(ErrorCode::BehindCamera, "marker corner lies behind the camera");
  }
  double cost = res.squaredNorm();
  double damping = 1e-3;
  for (int iter = 0; iter < 100 && cost > 1e-24; ++iter) {
    // Left-perturbation Jacobian: R <- exp(w) R, t <- t + dt.
    Eigen::Matrix<double, 8, 6> jac;
    for (int i = 0; i < 4; ++i) {
      const Vec3 rp = rotation * object[i];
      const Vec3 p = rp + translation;
      const double iz = 1.0 / p.z();
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << camera.fx() * iz, 0, -camera.fx() * p.x() * iz * iz, 0, camera.fy() * iz,
          -camera.fy() * p.y() * iz * iz;
      jac.block<2, 3>(2 * i, 0) = dproj * (-skew(rp));
      jac.block<2, 3>(2 * i, 3) = dproj;
    }
    const Eigen::Matrix<double, 6, 6> jtj = jac.transpose() * jac;
    const Eigen::Matrix<double, 6, 1> jtr = jac.transpose() * res;
    bool improved = false;
    for (int tries = 0; tries < 10; ++tries) {
      Eigen::Matrix<double, 6, 6> lhs = jtj;
      lhs.diagonal() += damping * jtj.diagonal().cwiseMax(1e-9);
      const Eigen::Matrix<double, 6, 1> step = lhs.ldlt().solve(-jtr);
      const Vec3 w = step.head<3>();
      const double angle = w.norm();
      const Mat3 dr = angle > 0 ? Eigen::AngleAxisd(angle, w / angle).toRotationMatrix()
                                : Mat3::Identity();
      const Mat3 cand_r = dr * rotation;
      const Vec3 cand_t = translation + step.tail<3>();
      Eigen::Matrix<double, 8, 1> cand_res;
      if (residuals(cand_r, cand_t, cand_res) && cand_res.squaredNorm() < cost) {
        rotation = nearest_rotation(cand_r);
        translation = cand_t;
        res = cand_res;
        const double gain = cost - cand_res.squaredNorm();
        cost = cand_res.squaredNorm();
        damping = std::max(damping * 0.3, 1e-12);
        improved = true;
        if (step.norm() < 1e-15 || gain < 1e-30) iter = 1000;
        break;
      }
      damping *= 10;
    }
    if (!improved) break;
  }

  for (const auto& corner : object) {
    if ((rotation * corner + translation).z() <= 0) {
      throw Error(ErrorCode::BehindCamera, "marker corner lies behind the camera");
    }
  }
  // Markers are one-sided: the camera must sit on the +z side of the table.
  if ((rotation.transpose() * translation).z() >= 0) {
    throw Error(ErrorCode::BehindCamera, "camera is behind the marker plane");
  }
  return RigidTransform::from_matrix(FrameId::Camera, FrameId::Table, rotation, translation);
}

Mat3 rpy_to_matrix(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

RigidTransform transform_from_config(const KeyValueConfig& config, const std::string& prefix,
                                     FrameId parent, FrameId child) {
  const auto t = config.get_vector(prefix + ".translation", 3);
  const auto rpy = config.get_vector(prefix + ".rpy", 3);
  return RigidTransform::from_matrix(parent, child, rpy_to_matrix(rpy[0], rpy[1], rpy[2]),
                                     Vec3(t[0], t[1], t[2]));
}

RigidTransform look_at(const Vec3& eye, const Vec3& target) {
  const Vec3 z = (target - eye).normalized();
  Vec3 up = Vec3::UnitZ();
  if (std::abs(z.dot(up)) > 1.0 - 1e-9) up = Vec3::UnitY();
  const Vec3 x = z.cross(up).normalized();
  const Vec3 y = z.cross(x);
  Mat3 table_from_camera;
  table_from_camera.col(0) = x;
  table_from_camera.col(1) = y;
  table_from_camera.col(2) = z;
  const Mat3 camera_from_table = table_from_camera.transpose();
  return RigidTransform::from_matrix(FrameId::Camera, FrameId::Table, camera_from_table,
                                     -(camera_from_table * eye));
}

}  // namespace assist

namespace assist {

Vec3 Box3D::to_local(const Vec3& p) const {
  const Vec3 d = p - center;
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * d.x() + s * d.y(), -s * d.x() + c * d.y(), d.z()};
}

bool Box3D::contains(const Vec3& p, double tolerance) const {
  const Vec3 local = to_local(p);
  return (local.cwiseAbs() - half_extents).maxCoeff() <= tolerance;
}

}  // namespace assist
