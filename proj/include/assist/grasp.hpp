#pragma once

#include <vector>

#include "assist/config.hpp"
#include "assist/geometry.hpp"

namespace assist {

// Oriented grasp rectangle on the table plane (Table frame, meters).
//   x, y   rectangle center
//   w      gripper opening span, measured along the closing axis
//   h      finger-contact length
//   theta  direction of the closing (w) axis, in (-pi/2, pi/2]
struct GraspRect5D {
  double x = 0, y = 0, w = 0, h = 0, theta = 0;
};

struct GraspCandidate {
  GraspRect5D rect;
  double confidence = 0;
};

struct GripperParams {
  double max_opening = 0.10;   // m
  double finger_length = 0.05; // m
  double pad_length = 0.02;    // m, contact length along the fingers
  double clearance = 0.01;     // m, added to object width for the commanded opening
  int theta_bins = 16;

  static GripperParams from_config(const KeyValueConfig& config);
};

struct GraspPose6D {
  RigidTransform pose;  // RobotBase <- Gripper
  double opening = 0;
  Vec3 approach = -Vec3::UnitZ();  // RobotBase frame, unit
};

// Width of `box` along the horizontal direction at angle `theta`, using the
// footprint's inscribed ellipse (exact on the box axes and for round objects).
double width_along(const Box3D& box, double theta);

// Confidence-ranked grasp rectangles over a theta grid fixed to the box axes.
// Throws NoFeasibleGrasp if no orientation fits the gripper.
std::vector<GraspCandidate> propose_grasps(const Box3D& box, const GripperParams& gripper);
std::vector<GraspCandidate> propose_grasps(const Box3D& box, double max_opening);

// Top-down grasp: approach along -z of the table, closing axis along theta,
// grasp point min(h/2, box height/2) below the box top. `base_from_table` is
// the RobotBase <- Table transform.
GraspPose6D lift_to_pose(const GraspCandidate& candidate, const Box3D& box,
                         const RigidTransform& base_from_table);

// Table <- Gripper rotation for a downward-pointing gripper whose closing axis
// has direction `theta` in the table plane.
Mat3 top_down_rotation(double theta);

}  // namespace assist
