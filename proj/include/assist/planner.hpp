#pragma once

#include <cstdint>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "assist/arm.hpp"
#include "assist/config.hpp"
#include "assist/error.hpp"
#include "assist/grasp.hpp"
#include "assist/scene.hpp"

namespace assist {

struct PoseGoal {
  RigidTransform target;  // RobotBase <- Gripper
  double pos_tol = 0.002;  // m
  double ori_tol = 0.5 * M_PI / 180;  // rad
};

struct PlannerParams {
  std::uint64_t seed = 1;
  int max_iterations = 50000;
  double extend_step = 0.1;      // rad, RRT extension (Euclidean in joint space)
  double waypoint_step = 0.1;    // rad, max per-joint change between output waypoints
  double edge_resolution = 0.02; // rad, collision-check spacing along edges
  double dls_damping = 0.01;
  int dls_iterations = 200;
  int goal_seeds = 24;           // random DLS seeds tried before the search starts
  int goal_sample_period = 64;   // RRT iterations between extra goal samples
  double pos_tol = 0.002;        // m
  double ori_tol = 0.5 * M_PI / 180;  // rad

  // Task-level motion parameters.
  double pregrasp_offset = 0.10;   // m, back along the approach direction
  double lift_height = 0.10;       // m
  double release_clearance = 0.01; // m, object bottom above the table at release
  double gripper_time = 1.0;       // s, open or close actuation
  double step_lin = 0.01;          // m, jog translation
  double step_ang = 0.1;           // rad, jog wrist rotation

  static PlannerParams from_config(const KeyValueConfig& config);
};

// Pose error: translation distance (m) and rotation angle (rad).
struct PoseError {
  double position = 0;
  double orientation = 0;
};
PoseError pose_error(const RigidTransform& a, const RigidTransform& b);

// Damped-least-squares descent from `seed` toward `target`, clamped to the
// joint limits. Returns the configuration if it ends within tolerance.
std::optional<JointConfig> dls_descent(const KinematicChain& chain, const JointConfig& seed,
                                       const RigidTransform& target, double pos_tol, double ori_tol,
                                       double damping, int iterations);

// Every configuration along a -> b at the spacing used for edge checks; the
// waypoint grid of the densified output is a subset of these points.
bool edge_valid(const KinematicChain& chain, const JointConfig& a, const JointConfig& b,
                const Scene& scene, std::optional<int> ignored_id, const PlannerParams& params);

// Joint-space RRT-Connect from q_start to a goal region whose configurations
// are sampled by DLS descent. Throws UnreachableGoal (target beyond the reach
// bound), StartInCollision, Timeout (iteration budget) or Cancelled.
Trajectory plan_to_pose(const KinematicChain& chain, const JointConfig& q_start, const PoseGoal& goal,
                        const Scene& scene, const PlannerParams& params,
                        std::optional<int> ignored_id = std::nullopt, std::stop_token stop = {},
                        int* iterations_used = nullptr);

enum class JogCommand { TxPlus, TxMinus, TyPlus, TyMinus, TzPlus, TzMinus, Rot, Open, Close };

inline constexpr std::array<JogCommand, 9> kAllJogCommands = {
    JogCommand::TxPlus, JogCommand::TxMinus, JogCommand::TyPlus, JogCommand::TyMinus, JogCommand::TzPlus,
    JogCommand::TzMinus, JogCommand::Rot,   JogCommand::Open,    JogCommand::Close};

std::string_view to_string(JogCommand cmd);
JogCommand jog_from_string(std::string_view name);

struct JogResult {
  JointConfig q;
  bool gripper_open = false;
  bool rejected = false;
  std::string reason;
  double duration = 0;  // s
};

// One keyboard-style jog. Translations move the tool center point along a
// RobotBase axis with the orientation held; rejected moves leave q unchanged.
JogResult jog(const KinematicChain& chain, const JointConfig& q, bool gripper_open, JogCommand cmd,
              double step_lin, double step_ang, const Scene& scene,
              std::optional<int> ignored_id = std::nullopt);

struct HeldObject {
  int id = 0;
  RigidTransform gripper_from_object;  // Gripper <- Object, ground truth
  // What the robot believes (from perception); placement is computed from
  // this when set.
  std::optional<RigidTransform> believed;
};

// Everything the robot side of a session mutates.
struct World {
  Scene scene;
  JointConfig q = JointConfig::Zero();
  bool gripper_open = false;
  std::optional<HeldObject> held;
};

RigidTransform table_from_gripper(const KinematicChain& chain, const JointConfig& q);

// Geometric grasp test at close time: fingers open to `opening` must straddle
// the object's footprint along the closing axis (for a sphere, its slice at or
// above the fingertips), pads must overlap it, the tool
// center must be between the table and the object top, and the approach must
// be near vertical.
struct GraspCheck {
  bool ok = false;
  std::string reason;
};
GraspCheck check_grasp(const SceneObject& object, const RigidTransform& table_from_gripper, double opening,
                       const GripperParams& gripper);

struct MotionOutcome {
  bool success = false;
  World world;
  std::string reason;
  std::optional<ErrorCode> error;
  double duration = 0;  // s, motion plus gripper actuation
  std::vector<Trajectory> trajectories;
  std::vector<double> trajectory_start;  // s, offset of each trajectory within `duration`
  int planner_iterations = 0;
};

struct PickOutcome : MotionOutcome {
  std::optional<int> object_id;
  std::optional<RigidTransform> table_from_grasp;  // tool pose when the gripper closed
};

struct PlaceOutcome : MotionOutcome {
  Vec2 final_center = Vec2::Zero();
};

// Open, pregrasp, descend, close, lift. Throws InvalidState if an object is
// already held; planner failures become unsuccessful outcomes.
PickOutcome execute_pick(const RobotConfig& robot, const World& world, const GraspPose6D& grasp,
                         const PlannerParams& params, std::stop_token stop = {});

// Pre-place above `target` (Table frame), descend to the release height, open,
// retreat. Throws NoHeldObject without a held object.
PlaceOutcome execute_place(const RobotConfig& robot, const World& world, const Vec3& target,
                           const PlannerParams& params, std::stop_token stop = {});

// World-level jog: CLOSE may grasp, OPEN releases, translations carry the
// held object.
struct WorldJog {
  World world;
  JogResult result;
  std::optional<int> grasped;
  std::optional<int> released;
};
WorldJog jog_world(const RobotConfig& robot, const World& world, JogCommand cmd, const PlannerParams& params);

// Drops the held object straight down onto the table, keeping its yaw.
World release_object(const RobotConfig& robot, const World& world);

}  // namespace assist
