#pragma once

// Independent reference implementations used as test oracles. They share no
// code with the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "assist/arm.hpp"
#include "assist/geometry.hpp"
#include "assist/random.hpp"

namespace oracle {

// O(n^2) flood fill over the radius graph; returns the member sets.
inline std::vector<std::vector<int>> components(const std::vector<assist::Vec3>& pts, double radius) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const int c = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<int> stack{s};
    comp[s] = c;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      out[c].push_back(i);
      for (int j = 0; j < n; ++j) {
        if (comp[j] < 0 && (pts[i] - pts[j]).squaredNorm() <= radius * radius) {
          comp[j] = c;
          stack.push_back(j);
        }
      }
    }
    std::sort(out[c].begin(), out[c].end());
  }
  return out;
}

// Largest component; ties go to the one holding the smallest index.
inline std::vector<int> largest_component(const std::vector<assist::Vec3>& pts, double radius) {
  auto comps = components(pts, radius);
  std::vector<int> best;
  for (const auto& c : comps) {
    if (c.size() > best.size() || (c.size() == best.size() && !c.empty() && c.front() < best.front())) best = c;
  }
  return best;
}

// Closest point on an oriented box to p, by clamping in the box axes.
inline double box_distance(const assist::Box3D& box, const assist::Vec3& p) {
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const assist::Vec3 d = p - box.center;
  const assist::Vec3 local(c * d.x() + s * d.y(), -s * d.x() + c * d.y(), d.z());
  assist::Vec3 q;
  for (int i = 0; i < 3; ++i) q[i] = std::clamp(local[i], -box.half_extents[i], box.half_extents[i]);
  return (local - q).norm();
}

// Dense 4x4 product of per-joint homogeneous matrices (Rodrigues form).
inline Eigen::Matrix4d rot4(const assist::Vec3& axis, double angle) {
  const assist::Vec3 a = axis.normalized();
  Eigen::Matrix3d k;
  k << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = Eigen::Matrix3d::Identity() + std::sin(angle) * k + (1 - std::cos(angle)) * k * k;
  return m;
}

inline Eigen::Matrix4d trans4(const assist::Vec3& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topRightCorner<3, 1>() = t;
  return m;
}

inline Eigen::Matrix4d rpy4(const assist::Vec3& rpy) {
  return rot4(assist::Vec3::UnitZ(), rpy.z()) * rot4(assist::Vec3::UnitY(), rpy.y()) *
         rot4(assist::Vec3::UnitX(), rpy.x());
}

inline Eigen::Matrix4d fk_matrix(const assist::KinematicChain& chain, const assist::JointConfig& q) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  for (int i = 0; i < assist::kDof; ++i) {
    const auto& j = chain.joints()[i];
    m = m * trans4(j.origin_xyz) * rpy4(j.origin_rpy) * rot4(j.axis, q[i]);
  }
  return m * chain.tool().matrix();
}

inline assist::JointConfig random_q(const assist::KinematicChain& chain, assist::Rng& rng) {
  assist::JointConfig q;
  for (int i = 0; i < assist::kDof; ++i) q[i] = rng.uniform(chain.joints()[i].lower, chain.joints()[i].upper);
  return q;
}

// Independent collision recheck: table halfspace plus sphere vs box distance.
inline bool recheck_collision_free(const assist::KinematicChain& chain, const assist::JointConfig& q,
                                   const std::vector<assist::Box3D>& boxes) {
  const Eigen::Matrix4d mount = [&] {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = chain.mount().rotation_matrix();
    m.topRightCorner<3, 1>() = chain.mount().translation();
    return m;
  }();
  std::vector<Eigen::Matrix4d> frames{mount};
  Eigen::Matrix4d m = mount;
  for (int i = 0; i < assist::kDof; ++i) {
    const auto& j = chain.joints()[i];
    m = m * trans4(j.origin_xyz) * rpy4(j.origin_rpy) * rot4(j.axis, q[i]);
    frames.push_back(m);
  }
  for (const auto& s : chain.spheres()) {
    const assist::Vec3 c = (frames[s.link] * s.center.homogeneous()).head<3>();
    if (c.z() - s.radius < 0) return false;
    if (s.table_only) continue;
    for (const auto& b : boxes) {
      if (box_distance(b, c) < s.radius) return false;
    }
  }
  return true;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace oracle
