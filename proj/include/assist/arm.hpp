#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "assist/config.hpp"
#include "assist/geometry.hpp"
#include "assist/grasp.hpp"
#include "assist/scene.hpp"

namespace assist {

inline constexpr int kDof = 7;

using JointConfig = Eigen::Matrix<double, kDof, 1>;
using Jacobian = Eigen::Matrix<double, 6, kDof>;

// Revolute joint: fixed origin transform from the previous link, then rotation
// about `axis` (unit, expressed in the joint frame).
struct JointSpec {
  Vec3 origin_xyz = Vec3::Zero();
  Vec3 origin_rpy = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  double lower = -M_PI;
  double upper = M_PI;
  double max_speed = 1.0;  // rad/s
};

// Sphere rigidly attached to link `link` (0 = base, i = frame after joint i).
// Contact spheres (fingertips) are tested against the table plane only, since
// the fingers must be able to reach around the object being grasped.
struct CollisionSphere {
  int link = 0;
  Vec3 center = Vec3::Zero();
  double radius = 0.05;
  bool table_only = false;
};

class KinematicChain {
 public:
  KinematicChain(std::array<JointSpec, kDof> joints, Eigen::Isometry3d tool,
                 std::vector<CollisionSphere> spheres, RigidTransform mount);

  // Loads the versioned arm config (schema = arm/1). See config/arm.cfg.
  static KinematicChain from_config(const KeyValueConfig& config);

  const std::array<JointSpec, kDof>& joints() const { return joints_; }
  const Eigen::Isometry3d& tool() const { return tool_; }
  const std::vector<CollisionSphere>& spheres() const { return spheres_; }
  // Table <- RobotBase.
  const RigidTransform& mount() const { return mount_; }
  RigidTransform base_from_table() const { return mount_.inverse(); }

  JointConfig lower() const;
  JointConfig upper() const;
  JointConfig max_speed() const;
  // Sum of all link offsets plus the tool offset; no tool point lies farther
  // from the base origin.
  double reach() const;

 private:
  std::array<JointSpec, kDof> joints_;
  Eigen::Isometry3d tool_;
  std::vector<CollisionSphere> spheres_;
  RigidTransform mount_;
};

// Poses of link frames 0..7 in RobotBase (index 0 is the base itself).
std::array<Eigen::Isometry3d, kDof + 1> link_frames(const KinematicChain& chain,
                                                    const JointConfig& q);

// RobotBase <- Gripper (tool center point).
RigidTransform fk(const KinematicChain& chain, const JointConfig& q);

// Geometric Jacobian in the base frame: rows 0-2 linear (m/rad), rows 3-5
// angular (rad/rad).
Jacobian jacobian(const KinematicChain& chain, const JointConfig& q);

bool within_limits(const KinematicChain& chain, const JointConfig& q);

struct WorldSphere {
  Vec3 center;  // Table frame
  double radius;
  bool table_only;
};
std::vector<WorldSphere> collision_spheres(const KinematicChain& chain, const JointConfig& q);

// Distance from `point` to the solid box (0 inside).
double distance_to_box(const Box3D& box, const Vec3& point);

// True iff no link sphere dips below the table plane or touches the bounding
// box of any object other than `ignored_id` (the held object).
bool collision_free(const KinematicChain& chain, const JointConfig& q, const Scene& scene,
                    std::optional<int> ignored_id = std::nullopt);
bool collision_free(const KinematicChain& chain, const JointConfig& q, const Scene& scene,
                    const SceneObject* held);

struct Trajectory {
  std::vector<JointConfig> waypoints;
  double duration = 0;  // s
};

// Constant-speed timing: each segment lasts as long as its slowest joint.
double segment_duration(const KinematicChain& chain, const JointConfig& a, const JointConfig& b);
double trajectory_duration(const KinematicChain& chain, const std::vector<JointConfig>& waypoints);

struct RobotConfig {
  KinematicChain chain;
  GripperParams gripper;
  JointConfig ready;  // start configuration for every trial

  static RobotConfig from_config(const KeyValueConfig& config);
  static RobotConfig load(const std::string& path);
  // Built-in default (same values as config/arm.cfg).
  static RobotConfig defaults();
};

// Text of the built-in default arm config.
const std::string& default_arm_config_text();

}  // namespace assist
