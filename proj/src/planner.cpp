#include "assist/planner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "assist/random.hpp"

namespace assist {

PlannerParams PlannerParams::from_config(const KeyValueConfig& c) {
  PlannerParams p;
  p.seed = static_cast<std::uint64_t>(c.get_int("planner.seed", static_cast<long long>(p.seed)));
  p.max_iterations = static_cast<int>(c.get_int("planner.max_iterations", p.max_iterations));
  p.extend_step = c.get_double("planner.extend_step", p.extend_step);
  p.waypoint_step = c.get_double("planner.waypoint_step", p.waypoint_step);
  p.edge_resolution = c.get_double("planner.edge_resolution", p.edge_resolution);
  p.dls_damping = c.get_double("planner.dls_damping", p.dls_damping);
  p.dls_iterations = static_cast<int>(c.get_int("planner.dls_iterations", p.dls_iterations));
  p.goal_seeds = static_cast<int>(c.get_int("planner.goal_seeds", p.goal_seeds));
  p.goal_sample_period = static_cast<int>(c.get_int("planner.goal_sample_period", p.goal_sample_period));
  p.pos_tol = c.get_double("planner.pos_tol", p.pos_tol);
  p.ori_tol = c.get_double("planner.ori_tol", p.ori_tol);
  p.pregrasp_offset = c.get_double("planner.pregrasp_offset", p.pregrasp_offset);
  p.lift_height = c.get_double("planner.lift_height", p.lift_height);
  p.release_clearance = c.get_double("planner.release_clearance", p.release_clearance);
  p.gripper_time = c.get_double("planner.gripper_time", p.gripper_time);
  p.step_lin = c.get_double("planner.step_lin", p.step_lin);
  p.step_ang = c.get_double("planner.step_ang", p.step_ang);
  if (p.max_iterations < 1 || !(p.extend_step > 0) || !(p.waypoint_step > 0) || !(p.edge_resolution > 0) ||
      !(p.pos_tol > 0) || !(p.ori_tol > 0) || p.dls_iterations < 1 || p.goal_seeds < 0 ||
      p.goal_sample_period < 1 || !(p.step_lin > 0) || !(p.step_ang > 0) || p.gripper_time < 0) {
    throw Error(ErrorCode::ConfigError, "invalid planner parameters");
  }
  return p;
}

PoseError pose_error(const RigidTransform& a, const RigidTransform& b) {
  return {(a.translation() - b.translation()).norm(), rotation_angle_between(a.rotation(), b.rotation())};
}

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

// Twist-like error (target relative to current), both in the base frame.
Vec6 pose_residual(const RigidTransform& current, const RigidTransform& target) {
  Vec6 e;
  e.head<3>() = target.translation() - current.translation();
  const Eigen::AngleAxisd aa(target.rotation() * current.rotation().conjugate());
  e.tail<3>() = aa.angle() * aa.axis();
  return e;
}

JointConfig dls_step(const Jacobian& j, const Vec6& e, double damping) {
  const Eigen::Matrix<double, 6, 6> jjt =
      j * j.transpose() + damping * damping * Eigen::Matrix<double, 6, 6>::Identity();
  return j.transpose() * jjt.ldlt().solve(e);
}

JointConfig clamp_limits(const KinematicChain& chain, const JointConfig& q) {
  return q.cwiseMax(chain.lower()).cwiseMin(chain.upper());
}

JointConfig random_config(const KinematicChain& chain, Rng& rng) {
  JointConfig q;
  for (int i = 0; i < kDof; ++i) {
    const auto& j = chain.joints()[static_cast<std::size_t>(i)];
    q[i] = rng.uniform(j.lower, j.upper);
  }
  return q;
}

int segment_count(const JointConfig& a, const JointConfig& b, const PlannerParams& p) {
  const double span = (b - a).cwiseAbs().maxCoeff();
  return std::max(1, static_cast<int>(std::ceil(span / p.waypoint_step)));
}

int check_subdivision(const PlannerParams& p) {
  return std::max(1, static_cast<int>(std::ceil(p.waypoint_step / p.edge_resolution)));
}

JointConfig lerp(const JointConfig& a, const JointConfig& b, int k, int n) {
  const double t = static_cast<double>(k) / static_cast<double>(n);
  return a + (b - a) * t;
}

struct Tree {
  std::vector<JointConfig> nodes;
  std::vector<int> parent;

  int add(const JointConfig& q, int p) {
    nodes.push_back(q);
    parent.push_back(p);
    return static_cast<int>(nodes.size()) - 1;
  }

  int nearest(const JointConfig& q) const {
    int best = 0;
    double best_d = (nodes[0] - q).squaredNorm();
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      const double d = (nodes[i] - q).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  std::vector<JointConfig> path_to_root(int idx) const {
    std::vector<JointConfig> out;
    for (int i = idx; i >= 0; i = parent[static_cast<std::size_t>(i)]) out.push_back(nodes[static_cast<std::size_t>(i)]);
    return out;
  }
};

enum class Extend { Trapped, Advanced, Reached };

class Search {
 public:
  Search(const KinematicChain& chain, const Scene& scene, std::optional<int> ignored, const PlannerParams& p)
      : chain_(chain), scene_(scene), ignored_(ignored), p_(p) {}

  bool edge(const JointConfig& a, const JointConfig& b) const {
    return edge_valid(chain_, a, b, scene_, ignored_, p_);
  }

  Extend extend(Tree& tree, const JointConfig& target, int& new_idx) const {
    const int near = tree.nearest(target);
    const JointConfig& from = tree.nodes[static_cast<std::size_t>(near)];
    const JointConfig delta = target - from;
    const double dist = delta.norm();
    const bool reaches = dist <= p_.extend_step;
    const JointConfig to = reaches ? target : JointConfig(from + delta * (p_.extend_step / dist));
    if (!edge(from, to)) return Extend::Trapped;
    new_idx = tree.add(to, near);
    return reaches ? Extend::Reached : Extend::Advanced;
  }

  Extend connect(Tree& tree, const JointConfig& target, int& new_idx) const {
    Extend r = Extend::Advanced;
    while (r == Extend::Advanced) r = extend(tree, target, new_idx);
    return r;
  }

 private:
  const KinematicChain& chain_;
  const Scene& scene_;
  std::optional<int> ignored_;
  const PlannerParams& p_;
};

std::vector<JointConfig> shortcut(const Search& search, const std::vector<JointConfig>& path) {
  std::vector<JointConfig> out{path.front()};
  std::size_t i = 0;
  while (i + 1 < path.size()) {
    std::size_t j = path.size() - 1;
    while (j > i + 1 && !search.edge(path[i], path[j])) --j;
    out.push_back(path[j]);
    i = j;
  }
  return out;
}

std::vector<JointConfig> densify(const std::vector<JointConfig>& path, const PlannerParams& p) {
  std::vector<JointConfig> out{path.front()};
  for (std::size_t i = 1; i < path.size(); ++i) {
    const int n = segment_count(path[i - 1], path[i], p);
    for (int k = 1; k <= n; ++k) out.push_back(k == n ? path[i] : lerp(path[i - 1], path[i], k, n));
  }
  return out;
}

}  // namespace

std::optional<JointConfig> dls_descent(const KinematicChain& chain, const JointConfig& seed,
                                       const RigidTransform& target, double pos_tol, double ori_tol,
                                       double damping, int iterations) {
  JointConfig q = clamp_limits(chain, seed);
  for (int it = 0; it < iterations; ++it) {
    const RigidTransform cur = fk(chain, q);
    const Vec6 e = pose_residual(cur, target);
    if (e.head<3>().norm() < 1e-9 && e.tail<3>().norm() < 1e-9) break;
    JointConfig dq = dls_step(jacobian(chain, q), e, damping);
    const double m = dq.cwiseAbs().maxCoeff();
    if (m > 0.2) dq *= 0.2 / m;
    const JointConfig next = clamp_limits(chain, q + dq);
    if ((next - q).cwiseAbs().maxCoeff() < 1e-13) break;
    q = next;
  }
  const PoseError err = pose_error(fk(chain, q), target);
  if (err.position <= pos_tol && err.orientation <= ori_tol) return q;
  return std::nullopt;
}

bool edge_valid(const KinematicChain& chain, const JointConfig& a, const JointConfig& b, const Scene& scene,
                std::optional<int> ignored_id, const PlannerParams& params) {
  if (!within_limits(chain, a) || !within_limits(chain, b)) return false;
  const int n = segment_count(a, b, params) * check_subdivision(params);
  for (int k = 1; k <= n; ++k) {
    if (!collision_free(chain, k == n ? b : lerp(a, b, k, n), scene, ignored_id)) return false;
  }
  return true;
}

Trajectory plan_to_pose(const KinematicChain& chain, const JointConfig& q_start, const PoseGoal& goal,
                        const Scene& scene, const PlannerParams& params, std::optional<int> ignored_id,
                        std::stop_token stop, int* iterations_used) {
  if (iterations_used) *iterations_used = 0;
  if (!q_start.allFinite()) throw Error(ErrorCode::InvalidArgument, "start configuration is not finite");
  if (!(goal.pos_tol > 0) || !(goal.ori_tol > 0)) {
    throw Error(ErrorCode::InvalidArgument, "pose tolerances must be positive");
  }
  if (goal.target.parent() != FrameId::RobotBase || goal.target.child() != FrameId::Gripper) {
    throw Error(ErrorCode::FrameMismatch, "pose goal must be robot_base<-gripper");
  }
  if (goal.target.translation().norm() > chain.reach()) {
    throw Error(ErrorCode::UnreachableGoal, "target lies beyond the arm's reach bound");
  }
  if (!within_limits(chain, q_start)) throw Error(ErrorCode::InvalidArgument, "start configuration violates joint limits");
  if (!collision_free(chain, q_start, scene, ignored_id)) {
    throw Error(ErrorCode::StartInCollision, "start configuration is in collision");
  }
  const auto finish = [&](std::vector<JointConfig> waypoints) {
    Trajectory t;
    t.waypoints = std::move(waypoints);
    t.duration = trajectory_duration(chain, t.waypoints);
    return t;
  };
  {
    const PoseError e = pose_error(fk(chain, q_start), goal.target);
    if (e.position <= goal.pos_tol && e.orientation <= goal.ori_tol) return finish({q_start});
  }

  Rng rng(params.seed);
  const Search search(chain, scene, ignored_id, params);
  const auto sample_goal = [&](const JointConfig& seed) -> std::optional<JointConfig> {
    auto q = dls_descent(chain, seed, goal.target, goal.pos_tol, goal.ori_tol, params.dls_damping,
                         params.dls_iterations);
    if (q && collision_free(chain, *q, scene, ignored_id)) return q;
    return std::nullopt;
  };

  Tree start_tree;
  start_tree.add(q_start, -1);
  Tree goal_tree;
  const auto add_goal = [&](const JointConfig& q) -> bool {
    goal_tree.add(q, -1);
    return search.edge(q_start, q);
  };

  // Goal region samples: the start itself is the first DLS seed, so nearby
  // solutions are preferred; a direct joint-space edge ends the search.
  if (auto q = sample_goal(q_start); q && add_goal(*q)) return finish(densify({q_start, *q}, params));
  for (int s = 0; s < params.goal_seeds && goal_tree.nodes.size() < 4; ++s) {
    if (stop.stop_requested()) throw Error(ErrorCode::Cancelled, "planning cancelled");
    if (auto q = sample_goal(random_config(chain, rng)); q && add_goal(*q)) {
      return finish(densify({q_start, *q}, params));
    }
  }

  Tree* a = &start_tree;
  Tree* b = &goal_tree;
  for (int it = 0; it < params.max_iterations; ++it) {
    if (iterations_used) *iterations_used = it + 1;
    if (stop.stop_requested()) throw Error(ErrorCode::Cancelled, "planning cancelled");
    if (goal_tree.nodes.empty() || (it + 1) % params.goal_sample_period == 0) {
      if (auto q = sample_goal(random_config(chain, rng))) goal_tree.add(*q, -1);
      if (goal_tree.nodes.empty()) continue;
    }
    const JointConfig q_rand = random_config(chain, rng);
    int idx_a = -1;
    if (search.extend(*a, q_rand, idx_a) == Extend::Trapped) {
      std::swap(a, b);
      continue;
    }
    int idx_b = -1;
    if (search.connect(*b, a->nodes[static_cast<std::size_t>(idx_a)], idx_b) == Extend::Reached) {
      const int s_idx = (a == &start_tree) ? idx_a : idx_b;
      const int g_idx = (a == &start_tree) ? idx_b : idx_a;
      std::vector<JointConfig> path = start_tree.path_to_root(s_idx);
      std::reverse(path.begin(), path.end());
      const auto tail = goal_tree.path_to_root(g_idx);
      path.insert(path.end(), tail.begin() + 1, tail.end());
      return finish(densify(shortcut(search, path), params));
    }
    std::swap(a, b);
  }
  throw Error(ErrorCode::Timeout, "no path found within " + std::to_string(params.max_iterations) + " iterations");
}

std::string_view to_string(JogCommand cmd) {
  switch (cmd) {
    case JogCommand::TxPlus: return "TX+";
    case JogCommand::TxMinus: return "TX-";
    case JogCommand::TyPlus: return "TY+";
    case JogCommand::TyMinus: return "TY-";
    case JogCommand::TzPlus: return "TZ+";
    case JogCommand::TzMinus: return "TZ-";
    case JogCommand::Rot: return "ROT";
    case JogCommand::Open: return "OPEN";
    case JogCommand::Close: return "CLOSE";
  }
  return "?";
}

JogCommand jog_from_string(std::string_view name) {
  for (JogCommand c : kAllJogCommands) {
    if (to_string(c) == name) return c;
  }
  throw Error(ErrorCode::ParseError, "unknown jog command '" + std::string(name) + "'");
}

JogResult jog(const KinematicChain& chain, const JointConfig& q, bool gripper_open, JogCommand cmd,
              double step_lin, double step_ang, const Scene& scene, std::optional<int> ignored_id) {
  JogResult r{q, gripper_open, false, {}, 0.0};
  const auto reject = [&](std::string why) {
    r.q = q;
    r.rejected = true;
    r.reason = std::move(why);
    return r;
  };
  Vec3 dir = Vec3::Zero();
  switch (cmd) {
    case JogCommand::Open: r.gripper_open = true; return r;
    case JogCommand::Close: r.gripper_open = false; return r;
    case JogCommand::Rot: {
      JointConfig next = q;
      next[kDof - 1] += step_ang;
      if (!within_limits(chain, next)) return reject("joint limit");
      if (!collision_free(chain, next, scene, ignored_id)) return reject("collision");
      r.q = next;
      r.duration = segment_duration(chain, q, next);
      return r;
    }
    case JogCommand::TxPlus: dir = Vec3::UnitX(); break;
    case JogCommand::TxMinus: dir = -Vec3::UnitX(); break;
    case JogCommand::TyPlus: dir = Vec3::UnitY(); break;
    case JogCommand::TyMinus: dir = -Vec3::UnitY(); break;
    case JogCommand::TzPlus: dir = Vec3::UnitZ(); break;
    case JogCommand::TzMinus: dir = -Vec3::UnitZ(); break;
  }
  const RigidTransform start = fk(chain, q);
  const RigidTransform target(FrameId::RobotBase, FrameId::Gripper, start.rotation(),
                              start.translation() + step_lin * dir);
  // One damped step, then two corrective steps so repeated jogs do not
  // accumulate orientation drift.
  JointConfig next = q;
  for (int k = 0; k < 3; ++k) {
    next += dls_step(jacobian(chain, next), pose_residual(fk(chain, next), target), 1e-3);
  }
  if (!within_limits(chain, next)) return reject("joint limit");
  if (pose_error(fk(chain, next), target).position >= 0.1 * step_lin) return reject("singular");
  if (!collision_free(chain, next, scene, ignored_id)) return reject("collision");
  r.q = next;
  r.duration = segment_duration(chain, q, next);
  return r;
}

RigidTransform table_from_gripper(const KinematicChain& chain, const JointConfig& q) {
  return compose(chain.mount(), fk(chain, q));
}

GraspCheck check_grasp(const SceneObject& object, const RigidTransform& tg, double opening,
                       const GripperParams& gripper) {
  const Mat3 r = tg.rotation_matrix();
  const Vec3 approach = r.col(2);
  if (approach.z() > -std::cos(10.0 * M_PI / 180)) return {false, "approach not vertical"};
  const Vec3 tcp = tg.translation();
  const Box3D box = object.bounding_box();
  if (!(tcp.z() > box.center.z() - box.half_extents.z()) || !(tcp.z() < box.top())) {
    return {false, "fingers not at object height"};
  }
  if (opening < object.grasp_width) return {false, "opening narrower than object"};
  Vec2 closing(r(0, 0), r(1, 0));
  if (closing.norm() < 1e-9) return {false, "closing axis vertical"};
  closing.normalize();
  const Vec2 pad_dir(-closing.y(), closing.x());
  Footprint fp = object.footprint();
  if (object.parts.size() == 1 && object.parts.front().kind == PrimitiveKind::Sphere) {
    // Only the slice at or above the fingertips has to fit between the fingers.
    const double r = object.parts.front().radius();
    const double zc = object.pose.apply(object.parts.front().center).z();
    const double dz = std::max(0.0, tcp.z() - gripper.pad_length / 2 - zc);
    fp.half.setConstant(std::sqrt(std::max(0.0, r * r - dz * dz)));
  }
  const Vec2 origin = tcp.head<2>();
  const auto [c_lo, c_hi] = fp.project(origin, closing);
  if (c_lo < -opening / 2 || c_hi > opening / 2) return {false, "fingers do not straddle object"};
  const auto [p_lo, p_hi] = fp.project(origin, pad_dir);
  if (!(p_lo < gripper.pad_length / 2) || !(p_hi > -gripper.pad_length / 2)) {
    return {false, "pads miss object"};
  }
  return {true, {}};
}

namespace {

// Top-down grasps are symmetric under a half turn about the approach axis;
// choose the variant closer to the current wrist orientation.
RigidTransform closer_variant(const RigidTransform& goal, const RigidTransform& current) {
  const Quat flipped = goal.rotation() * Quat(Eigen::AngleAxisd(M_PI, Vec3::UnitZ()));
  if (rotation_angle_between(flipped, current.rotation()) < rotation_angle_between(goal.rotation(), current.rotation())) {
    return {goal.parent(), goal.child(), flipped, goal.translation()};
  }
  return goal;
}

// Tool pose shifted by `offset` along a Table-frame direction.
RigidTransform shifted(const KinematicChain& chain, const RigidTransform& base_from_gripper, const Vec3& offset_table) {
  const Vec3 offset_base = chain.mount().inverse().rotate(offset_table);
  return {base_from_gripper.parent(), base_from_gripper.child(), base_from_gripper.rotation(),
          base_from_gripper.translation() + offset_base};
}

World carry(const RobotConfig& robot, World w) {
  if (!w.held) return w;
  const RigidTransform pose = compose(table_from_gripper(robot.chain, w.q), w.held->gripper_from_object);
  w.scene = apply_motion(w.scene, w.held->id, pose);
  return w;
}

// Runs one planned move inside an outcome; false (with the outcome filled in)
// on planner failure.
bool move(const RobotConfig& robot, MotionOutcome& out, const RigidTransform& target, const PlannerParams& p,
          std::stop_token stop, std::uint64_t stream) {
  PlannerParams local = p;
  local.seed = derive_seed(p.seed, stream);
  const PoseGoal goal{target, p.pos_tol, p.ori_tol};
  const std::optional<int> ignored = out.world.held ? std::optional<int>(out.world.held->id) : std::nullopt;
  int used = 0;
  try {
    Trajectory t = plan_to_pose(robot.chain, out.world.q, goal, out.world.scene, local, ignored, stop, &used);
    out.planner_iterations += used;
    out.world.q = t.waypoints.back();
    out.trajectory_start.push_back(out.duration);
    out.duration += t.duration;
    out.trajectories.push_back(std::move(t));
    out.world = carry(robot, std::move(out.world));
    return true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Cancelled) throw;
    out.planner_iterations += used;
    out.success = false;
    out.error = e.code();
    out.reason = e.what();
    return false;
  }
}

}  // namespace

World release_object(const RobotConfig& robot, const World& world) {
  if (!world.held) throw Error(ErrorCode::NoHeldObject, "no object is held");
  const RigidTransform pose = compose(table_from_gripper(robot.chain, world.q), world.held->gripper_from_object);
  const Vec3 x_axis = pose.rotation_matrix().col(0);
  const double yaw = std::atan2(x_axis.y(), x_axis.x());
  const Vec3 t = pose.translation();
  World out = world;
  out.scene = apply_motion(world.scene, world.held->id,
                           RigidTransform::from_yaw(FrameId::Table, FrameId::Object, yaw, Vec3(t.x(), t.y(), 0.0)));
  out.held.reset();
  return out;
}

PickOutcome execute_pick(const RobotConfig& robot, const World& world, const GraspPose6D& grasp,
                         const PlannerParams& params, std::stop_token stop) {
  if (world.held) throw Error(ErrorCode::InvalidState, "an object is already held");
  PickOutcome out;
  out.world = world;
  out.world.gripper_open = true;
  out.duration += params.gripper_time;

  const RigidTransform current = fk(robot.chain, world.q);
  const RigidTransform grasp_pose = closer_variant(grasp.pose, current);
  const Vec3 back_base = -grasp.approach.normalized() * params.pregrasp_offset;
  const RigidTransform pregrasp(grasp_pose.parent(), grasp_pose.child(), grasp_pose.rotation(),
                                grasp_pose.translation() + back_base);
  if (!move(robot, out, pregrasp, params, stop, 1)) return out;
  if (!move(robot, out, grasp_pose, params, stop, 2)) return out;

  // Close: the first object whose footprint the fingers straddle is held.
  const RigidTransform tg = table_from_gripper(robot.chain, out.world.q);
  out.table_from_grasp = tg;
  out.world.gripper_open = false;
  out.duration += params.gripper_time;
  const SceneObject* nearest = nullptr;
  for (const auto& obj : out.world.scene.objects) {
    if (!obj.on_table) continue;
    if (check_grasp(obj, tg, grasp.opening, robot.gripper).ok) {
      out.object_id = obj.id;
      out.world.held = HeldObject{obj.id, compose(tg.inverse(), obj.pose), std::nullopt};
      break;
    }
    const double d = (obj.pose.translation() - tg.translation()).head<2>().norm();
    if (!nearest || d < (nearest->pose.translation() - tg.translation()).head<2>().norm()) nearest = &obj;
  }
  const std::string miss_reason =
      nearest ? check_grasp(*nearest, tg, grasp.opening, robot.gripper).reason : "no object on the table";

  const RigidTransform lift = shifted(robot.chain, fk(robot.chain, out.world.q), Vec3(0, 0, params.lift_height));
  const bool lifted = move(robot, out, lift, params, stop, 3);
  if (!out.object_id) {
    out.success = false;
    out.reason = miss_reason;
    return out;
  }
  out.success = lifted;
  return out;
}

PlaceOutcome execute_place(const RobotConfig& robot, const World& world, const Vec3& target,
                           const PlannerParams& params, std::stop_token stop) {
  if (!world.held) throw Error(ErrorCode::NoHeldObject, "place requested with an empty gripper");
  PlaceOutcome out;
  out.world = world;
  if (!world.scene.reachable_region.contains(target.head<2>())) {
    out.error = ErrorCode::UnreachableGoal;
    out.reason = "place target outside the reachable region";
    return out;
  }
  const SceneObject& obj = world.scene.at(world.held->id);
  const RigidTransform current = table_from_gripper(robot.chain, world.q);
  // Keep the carried orientation; put the object origin (footprint center,
  // bottom face) at the target, raised by the release clearance.
  const Vec3 object_origin(target.x(), target.y(), params.release_clearance - obj.local_min().z());
  const RigidTransform& g_o = world.held->believed ? *world.held->believed : world.held->gripper_from_object;
  const Vec3 gripper_pos = object_origin - current.rotation() * g_o.translation();
  const RigidTransform release_table(FrameId::Table, FrameId::Gripper, current.rotation(), gripper_pos);
  const RigidTransform release = compose(robot.chain.base_from_table(), release_table);
  const RigidTransform preplace = shifted(robot.chain, release, Vec3(0, 0, params.lift_height));

  if (!move(robot, out, preplace, params, stop, 11)) return out;
  if (!move(robot, out, release, params, stop, 12)) return out;
  out.world = release_object(robot, out.world);
  out.world.gripper_open = true;
  out.duration += params.gripper_time;
  const SceneObject& placed = out.world.scene.at(world.held->id);
  out.final_center = placed.footprint().center;
  out.success = true;
  const RigidTransform retreat = shifted(robot.chain, fk(robot.chain, out.world.q), Vec3(0, 0, params.lift_height));
  MotionOutcome scratch;
  scratch.world = out.world;
  if (move(robot, scratch, retreat, params, stop, 13)) {
    out.world = scratch.world;
    out.duration += scratch.duration;
    out.planner_iterations += scratch.planner_iterations;
    for (std::size_t i = 0; i < scratch.trajectories.size(); ++i) {
      out.trajectory_start.push_back(out.duration - scratch.duration + scratch.trajectory_start[i]);
      out.trajectories.push_back(std::move(scratch.trajectories[i]));
    }
  }
  return out;
}

WorldJog jog_world(const RobotConfig& robot, const World& world, JogCommand cmd, const PlannerParams& params) {
  WorldJog out{world, {}, std::nullopt, std::nullopt};
  const std::optional<int> ignored = world.held ? std::optional<int>(world.held->id) : std::nullopt;
  out.result = jog(robot.chain, world.q, world.gripper_open, cmd, params.step_lin, params.step_ang, world.scene, ignored);
  if (out.result.rejected) return out;
  if (cmd == JogCommand::Open || cmd == JogCommand::Close) {
    const bool changed = out.result.gripper_open != world.gripper_open;
    out.result.duration = changed ? params.gripper_time : 0.0;
    if (cmd == JogCommand::Open && world.held) {
      out.world = release_object(robot, world);
      out.released = world.held->id;
    }
    out.world.gripper_open = out.result.gripper_open;
    if (cmd == JogCommand::Close && changed && !world.held) {
      const RigidTransform tg = table_from_gripper(robot.chain, world.q);
      for (const auto& obj : world.scene.objects) {
        if (obj.on_table && check_grasp(obj, tg, robot.gripper.max_opening, robot.gripper).ok) {
          out.world.held = HeldObject{obj.id, compose(tg.inverse(), obj.pose), std::nullopt};
          out.grasped = obj.id;
          break;
        }
      }
    }
    return out;
  }
  out.world.q = out.result.q;
  out.world = carry(robot, std::move(out.world));
  return out;
}

}  // namespace assist
