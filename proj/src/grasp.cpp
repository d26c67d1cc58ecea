#include "assist/grasp.hpp"

#include <algorithm>
#include <cmath>

#include "assist/error.hpp"

namespace assist {

GripperParams GripperParams::from_config(const KeyValueConfig& config) {
  GripperParams g;
  g.max_opening = config.get_double("gripper.max_opening", g.max_opening);
  g.finger_length = config.get_double("gripper.finger_length", g.finger_length);
  g.pad_length = config.get_double("gripper.pad_length", g.pad_length);
  g.clearance = config.get_double("gripper.clearance", g.clearance);
  g.theta_bins = static_cast<int>(config.get_int("gripper.theta_bins", g.theta_bins));
  if (!(g.max_opening > 0) || !(g.pad_length > 0) || g.clearance < 0 || g.theta_bins < 1) {
    throw Error(ErrorCode::ConfigError, "invalid gripper parameters");
  }
  return g;
}

double width_along(const Box3D& box, double theta) {
  const double a = box.half_extents.x();
  const double b = box.half_extents.y();
  const double s = std::sin(theta - box.yaw);
  // a^2 cos^2 + b^2 sin^2 written so that a == b gives exactly 2a.
  return 2.0 * std::sqrt(a * a + (b * b - a * a) * s * s);
}

std::vector<GraspCandidate> propose_grasps(const Box3D& box, const GripperParams& gripper) {
  if (!(box.half_extents.minCoeff() > 0)) {
    throw Error(ErrorCode::InvalidArgument, "box half extents must be positive");
  }
  const double height = 2 * box.half_extents.z();
  const double height_factor = std::clamp(height / gripper.pad_length, 0.0, 1.0);
  std::vector<GraspCandidate> out;
  for (int k = 0; k < gripper.theta_bins; ++k) {
    // Offsets -pi/2 + (k+1) pi/n cover (-pi/2, pi/2] and include 0.
    const double offset = -M_PI / 2 + (k + 1) * M_PI / gripper.theta_bins;
    const double theta = wrap_half_pi(box.yaw + offset);
    const double required = width_along(box, theta) + gripper.clearance;
    if (required > gripper.max_opening) continue;
    GraspCandidate c;
    c.rect = {box.center.x(), box.center.y(), required, gripper.pad_length, theta};
    c.confidence = std::clamp((gripper.max_opening - required) / gripper.max_opening, 0.0, 1.0) *
                   height_factor;
    out.push_back(c);
  }
  if (out.empty()) {
    throw Error(ErrorCode::NoFeasibleGrasp, "object wider than the gripper in every orientation");
  }
  std::stable_sort(out.begin(), out.end(), [](const GraspCandidate& a, const GraspCandidate& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return std::abs(a.rect.theta) < std::abs(b.rect.theta);
  });
  return out;
}

std::vector<GraspCandidate> propose_grasps(const Box3D& box, double max_opening) {
  GripperParams g;
  g.max_opening = max_opening;
  return propose_grasps(box, g);
}

Mat3 top_down_rotation(double theta) {
  const Vec3 x(std::cos(theta), std::sin(theta), 0);
  const Vec3 z(0, 0, -1);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = z.cross(x);
  r.col(2) = z;
  return r;
}

GraspPose6D lift_to_pose(const GraspCandidate& candidate, const Box3D& box,
                         const RigidTransform& base_from_table) {
  if (base_from_table.parent() != FrameId::RobotBase || base_from_table.child() != FrameId::Table) {
    throw Error(ErrorCode::FrameMismatch, "lift_to_pose expects a robot_base<-table transform");
  }
  const GraspRect5D& r = candidate.rect;
  const double z = box.top() - std::min(r.h / 2, box.half_extents.z());
  const auto table_from_gripper = RigidTransform::from_matrix(
      FrameId::Table, FrameId::Gripper, top_down_rotation(r.theta), Vec3(r.x, r.y, z));
  GraspPose6D out{compose(base_from_table, table_from_gripper), r.w,
                  base_from_table.rotate(-Vec3::UnitZ()).normalized()};
  return out;
}

}  // namespace assist
