#include "assist/arm.hpp"

#include <algorithm>
#include <cmath>

#include "assist/error.hpp"

namespace assist {

namespace {

Eigen::Isometry3d make_iso(const Vec3& xyz, const Vec3& rpy) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.linear() = rpy_to_matrix(rpy.x(), rpy.y(), rpy.z());
  t.translation() = xyz;
  return t;
}

Vec3 vec3_key(const KeyValueConfig& c, const std::string& key, const Vec3& fallback) {
  if (!c.has(key)) return fallback;
  const auto v = c.get_vector(key, 3);
  return {v[0], v[1], v[2]};
}

}  // namespace

KinematicChain::KinematicChain(std::array<JointSpec, kDof> joints, Eigen::Isometry3d tool,
                               std::vector<CollisionSphere> spheres, RigidTransform mount)
    : joints_(std::move(joints)), tool_(tool), spheres_(std::move(spheres)), mount_(mount) {
  for (auto& j : joints_) {
    if (!(j.lower <= j.upper)) throw Error(ErrorCode::ConfigError, "joint limits must satisfy lo <= hi");
    if (!(j.max_speed > 0)) throw Error(ErrorCode::ConfigError, "joint speed must be positive");
    const double n = j.axis.norm();
    if (!(n > 0) || !std::isfinite(n)) throw Error(ErrorCode::ConfigError, "joint axis must be nonzero");
    j.axis /= n;
  }
  for (const auto& s : spheres_) {
    if (!(s.radius > 0)) throw Error(ErrorCode::ConfigError, "collision sphere radius must be positive");
    if (s.link < 0 || s.link > kDof) throw Error(ErrorCode::ConfigError, "collision sphere link out of range");
  }
  if (mount_.parent() != FrameId::Table || mount_.child() != FrameId::RobotBase) {
    throw Error(ErrorCode::FrameMismatch, "arm mount must be table<-robot_base");
  }
}

KinematicChain KinematicChain::from_config(const KeyValueConfig& c) {
  const std::string schema = c.get_string("schema", "");
  if (schema != "arm/1") {
    throw Error(ErrorCode::ConfigError, c.origin() + ": expected schema = arm/1, got '" + schema + "'");
  }
  std::array<JointSpec, kDof> joints;
  for (int i = 0; i < kDof; ++i) {
    const std::string p = "arm.joint" + std::to_string(i + 1) + ".";
    JointSpec& j = joints[static_cast<std::size_t>(i)];
    j.origin_xyz = vec3_key(c, p + "origin_xyz", Vec3::Zero());
    j.origin_rpy = vec3_key(c, p + "origin_rpy", Vec3::Zero());
    j.axis = vec3_key(c, p + "axis", Vec3::UnitZ());
    const auto lim = c.get_vector(p + "limits", 2);
    j.lower = lim[0];
    j.upper = lim[1];
    j.max_speed = c.get_double(p + "max_speed");
  }
  const Eigen::Isometry3d tool =
      make_iso(vec3_key(c, "arm.tool.origin_xyz", Vec3::Zero()), vec3_key(c, "arm.tool.origin_rpy", Vec3::Zero()));
  std::vector<CollisionSphere> spheres;
  const auto count = c.get_int("arm.spheres.count", 0);
  for (long long i = 1; i <= count; ++i) {
    const auto v = c.get_vector("arm.sphere" + std::to_string(i), 5);
    if (v[0] != std::floor(v[0])) throw Error(ErrorCode::ConfigError, "sphere link index must be an integer");
    spheres.push_back({static_cast<int>(v[0]), Vec3(v[1], v[2], v[3]), v[4], false});
  }
  const auto contacts = c.get_int("arm.contacts.count", 0);
  for (long long i = 1; i <= contacts; ++i) {
    const auto v = c.get_vector("arm.contact" + std::to_string(i), 5);
    if (v[0] != std::floor(v[0])) throw Error(ErrorCode::ConfigError, "contact link index must be an integer");
    spheres.push_back({static_cast<int>(v[0]), Vec3(v[1], v[2], v[3]), v[4], true});
  }
  const RigidTransform mount = transform_from_config(c, "arm.mount", FrameId::Table, FrameId::RobotBase);
  return KinematicChain(joints, tool, std::move(spheres), mount);
}

JointConfig KinematicChain::lower() const {
  JointConfig q;
  for (int i = 0; i < kDof; ++i) q[i] = joints_[static_cast<std::size_t>(i)].lower;
  return q;
}

JointConfig KinematicChain::upper() const {
  JointConfig q;
  for (int i = 0; i < kDof; ++i) q[i] = joints_[static_cast<std::size_t>(i)].upper;
  return q;
}

JointConfig KinematicChain::max_speed() const {
  JointConfig q;
  for (int i = 0; i < kDof; ++i) q[i] = joints_[static_cast<std::size_t>(i)].max_speed;
  return q;
}

double KinematicChain::reach() const {
  double r = 0;
  for (const auto& j : joints_) r += j.origin_xyz.norm();
  return r + tool_.translation().norm();
}

std::array<Eigen::Isometry3d, kDof + 1> link_frames(const KinematicChain& chain, const JointConfig& q) {
  std::array<Eigen::Isometry3d, kDof + 1> frames;
  frames[0] = Eigen::Isometry3d::Identity();
  for (int i = 0; i < kDof; ++i) {
    const JointSpec& j = chain.joints()[static_cast<std::size_t>(i)];
    Eigen::Isometry3d step = make_iso(j.origin_xyz, j.origin_rpy);
    step.rotate(Eigen::AngleAxisd(q[i], j.axis));
    frames[static_cast<std::size_t>(i) + 1] = frames[static_cast<std::size_t>(i)] * step;
  }
  return frames;
}

RigidTransform fk(const KinematicChain& chain, const JointConfig& q) {
  const auto frames = link_frames(chain, q);
  const Eigen::Isometry3d tcp = frames[kDof] * chain.tool();
  return RigidTransform::from_matrix(FrameId::RobotBase, FrameId::Gripper, tcp.linear(), tcp.translation());
}

Jacobian jacobian(const KinematicChain& chain, const JointConfig& q) {
  const auto frames = link_frames(chain, q);
  const Vec3 p = (frames[kDof] * chain.tool()).translation();
  Jacobian jac;
  for (int i = 0; i < kDof; ++i) {
    // Joint i rotates frame i+1 about its axis; the axis is the same before and
    // after the rotation, so frame i+1 expresses it.
    const Eigen::Isometry3d& f = frames[static_cast<std::size_t>(i) + 1];
    const Vec3 w = f.linear() * chain.joints()[static_cast<std::size_t>(i)].axis;
    jac.block<3, 1>(0, i) = w.cross(p - f.translation());
    jac.block<3, 1>(3, i) = w;
  }
  return jac;
}

bool within_limits(const KinematicChain& chain, const JointConfig& q) {
  for (int i = 0; i < kDof; ++i) {
    const JointSpec& j = chain.joints()[static_cast<std::size_t>(i)];
    if (!std::isfinite(q[i]) || q[i] < j.lower || q[i] > j.upper) return false;
  }
  return true;
}

std::vector<WorldSphere> collision_spheres(const KinematicChain& chain, const JointConfig& q) {
  const auto frames = link_frames(chain, q);
  const Mat3 r = chain.mount().rotation_matrix();
  const Vec3 t = chain.mount().translation();
  std::vector<WorldSphere> out;
  out.reserve(chain.spheres().size());
  for (const auto& s : chain.spheres()) {
    const Vec3 base = frames[static_cast<std::size_t>(s.link)] * s.center;
    out.push_back({r * base + t, s.radius, s.table_only});
  }
  return out;
}

double distance_to_box(const Box3D& box, const Vec3& point) {
  const Vec3 local = box.to_local(point);
  const Vec3 excess = (local.cwiseAbs() - box.half_extents).cwiseMax(0.0);
  return excess.norm();
}

bool collision_free(const KinematicChain& chain, const JointConfig& q, const Scene& scene,
                    std::optional<int> ignored_id) {
  const auto spheres = collision_spheres(chain, q);
  for (const auto& s : spheres) {
    if (s.center.z() - s.radius < 0) return false;
  }
  for (const auto& obj : scene.objects) {
    if (ignored_id && obj.id == *ignored_id) continue;
    const Box3D box = obj.bounding_box();
    const double bound = box.half_extents.norm();
    for (const auto& s : spheres) {
      if (s.table_only) continue;
      if ((s.center - box.center).norm() > bound + s.radius) continue;
      if (distance_to_box(box, s.center) < s.radius) return false;
    }
  }
  return true;
}

bool collision_free(const KinematicChain& chain, const JointConfig& q, const Scene& scene,
                    const SceneObject* held) {
  return collision_free(chain, q, scene, held ? std::optional<int>(held->id) : std::nullopt);
}

double segment_duration(const KinematicChain& chain, const JointConfig& a, const JointConfig& b) {
  return ((b - a).cwiseAbs().cwiseQuotient(chain.max_speed())).maxCoeff();
}

double trajectory_duration(const KinematicChain& chain, const std::vector<JointConfig>& waypoints) {
  double total = 0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    total += segment_duration(chain, waypoints[i - 1], waypoints[i]);
  }
  return total;
}

RobotConfig RobotConfig::from_config(const KeyValueConfig& config) {
  KinematicChain chain = KinematicChain::from_config(config);
  GripperParams gripper = GripperParams::from_config(config);
  const auto r = config.get_vector("arm.ready", kDof);
  JointConfig ready;
  for (int i = 0; i < kDof; ++i) ready[i] = r[static_cast<std::size_t>(i)];
  if (!within_limits(chain, ready)) throw Error(ErrorCode::ConfigError, "arm.ready violates joint limits");
  return {std::move(chain), gripper, ready};
}

RobotConfig RobotConfig::load(const std::string& path) {
  return from_config(KeyValueConfig::load(path));
}

RobotConfig RobotConfig::defaults() {
  return from_config(KeyValueConfig::parse(default_arm_config_text(), "<builtin arm>"));
}

const std::string& default_arm_config_text() {
  static const std::string text = R"(# 7-DOF spherical-shoulder / revolute-elbow / spherical-wrist arm.
# Lengths in meters, angles in radians, speeds in rad/s.
schema = arm/1

# Table <- RobotBase: pedestal beside the near table edge, x axis pointing
# across the table.
arm.mount.translation = 0 -0.50 0
arm.mount.rpy = 0 0 1.5707963267948966

arm.joint1.origin_xyz = 0 0 0.15
arm.joint1.axis = 0 0 1
arm.joint1.limits = -2.96 2.96
arm.joint1.max_speed = 0.6
arm.joint2.origin_xyz = 0 0 0.19
arm.joint2.axis = 0 1 0
arm.joint2.limits = -2.09 2.09
arm.joint2.max_speed = 0.6
arm.joint3.origin_xyz = 0 0 0.21
arm.joint3.axis = 0 0 1
arm.joint3.limits = -2.96 2.96
arm.joint3.max_speed = 0.6
arm.joint4.origin_xyz = 0 0 0.21
arm.joint4.axis = 0 -1 0
arm.joint4.limits = -2.60 2.60
arm.joint4.max_speed = 0.6
arm.joint5.origin_xyz = 0 0 0.21
arm.joint5.axis = 0 0 1
arm.joint5.limits = -2.96 2.96
arm.joint5.max_speed = 0.8
arm.joint6.origin_xyz = 0 0 0.21
arm.joint6.axis = 0 1 0
arm.joint6.limits = -2.09 2.09
arm.joint6.max_speed = 0.8
arm.joint7.origin_xyz = 0 0 0.08
arm.joint7.axis = 0 0 1
arm.joint7.limits = -3.05 3.05
arm.joint7.max_speed = 1.0

# Tool center point: midway between the finger pads.
arm.tool.origin_xyz = 0 0 0.20

# link  cx cy cz  radius   (link 0 = base, k = frame after joint k)
arm.spheres.count = 11
arm.sphere1 = 0  0 0 0.09  0.08
arm.sphere2 = 1  0 0 0.10  0.07
arm.sphere3 = 2  0 0 0.00  0.07
arm.sphere4 = 2  0 0 0.12  0.06
arm.sphere5 = 3  0 0 0.10  0.06
arm.sphere6 = 4  0 0 0.00  0.06
arm.sphere7 = 4  0 0 0.11  0.055
arm.sphere8 = 5  0 0 0.10  0.05
arm.sphere9 = 6  0 0 0.00  0.05
arm.sphere10 = 7 0 0 0.02  0.05
arm.sphere11 = 7 0 0 0.10  0.04

# Table-contact spheres: fingertip region around the tool center point.
arm.contacts.count = 1
arm.contact1 = 7 0 0 0.20  0.004

# Start of every trial: gripper pointing down 30 cm above (0, -0.10).
arm.ready = 0 0.0483387235329437 0 -1.96407620595474 0 1.12917772405678 -1.5707963267949

gripper.max_opening = 0.10
gripper.finger_length = 0.05
gripper.pad_length = 0.02
gripper.clearance = 0.01
gripper.theta_bins = 16
)";
  return text;
}

}  // namespace assist
