#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "assist/config.hpp"
#include "assist/geometry.hpp"

namespace assist {

enum class ObjectClass {
  Stapler,
  Spoon,
  Banana,
  ScrewDriver,
  Bowl,
  Ball,
  Sunglasses,
  Pliers,
  Scissor,
  Tape,
};

inline constexpr std::array<ObjectClass, 10> kAllClasses = {
    ObjectClass::Stapler, ObjectClass::Spoon,      ObjectClass::Banana, ObjectClass::ScrewDriver,
    ObjectClass::Bowl,    ObjectClass::Ball,       ObjectClass::Sunglasses,
    ObjectClass::Pliers,  ObjectClass::Scissor,    ObjectClass::Tape};

// Display names ("screw driver"); `token` form replaces spaces with '_'.
std::string_view to_string(ObjectClass label);
std::string class_token(ObjectClass label);
ObjectClass class_from_string(std::string_view name);

enum class PrimitiveKind { Box, Cylinder, Sphere };

// Solid in the object frame. Boxes are axis-aligned there; cylinders are
// vertical. `size` is the full extent along x, y, z (so a cylinder of radius r
// and height h has size (2r, 2r, h)).
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::Box;
  Vec3 size = Vec3::Ones();
  Vec3 center = Vec3::Zero();

  double radius() const { return size.x() / 2; }
};

// Horizontal outline used for overlap tests, grasp checks and placement
// judging. Round footprints are circles of radius half.x().
struct Footprint {
  Vec2 center = Vec2::Zero();
  Vec2 half = Vec2::Zero();
  double yaw = 0.0;
  bool round = false;

  Vec2 to_local(const Vec2& p) const;
  bool contains(const Vec2& p, double tolerance = 0.0) const;
  // Extent of the footprint's projection onto `direction` (unit), as an
  // interval relative to `origin`.
  std::pair<double, double> project(const Vec2& origin, const Vec2& direction) const;
  std::array<Vec2, 4> corners() const;
};

bool footprints_overlap(const Footprint& a, const Footprint& b, double gap = 0.0);

struct SceneObject {
  int id = 0;
  ObjectClass label = ObjectClass::Ball;
  std::vector<Primitive> parts;
  RigidTransform pose = RigidTransform::identity(FrameId::Table).retagged(FrameId::Table,
                                                                          FrameId::Object);
  double grasp_width = 0.0;
  bool on_table = true;

  // Object-frame bounding box of all parts.
  Vec3 local_min() const;
  Vec3 local_max() const;
  double height() const { return local_max().z() - local_min().z(); }
  // Table-frame oriented bounding box; yaw taken from the pose.
  Box3D bounding_box() const;
  Footprint footprint() const;
  double yaw() const;
};

// Canonical geometry for each class; id and pose are left for the caller.
SceneObject make_object(ObjectClass label, int id, double x, double y, double yaw);

struct SceneConfig {
  Rect2 table_extent{-0.60, 0.60, -0.40, 0.40};
  Rect2 reachable_region{-0.35, 0.35, -0.25, 0.25};
  double min_gap = 0.05;        // clearance between spawned footprints (m)
  int max_attempts = 2000;      // rejection-sampling budget per object

  static SceneConfig from_config(const KeyValueConfig& config);
};

struct Scene {
  std::vector<SceneObject> objects;
  Rect2 table_extent;
  Rect2 reachable_region;
  std::uint64_t rng_seed = 0;

  const SceneObject* find(int id) const;
  const SceneObject& at(int id) const;
};

// Random, non-overlapping placement of one object per entry in `classes`
// inside the reachable region. Object ids start at 2 (0 = background,
// 1 = table in label images).
Scene spawn_scene(std::uint64_t seed, const std::vector<ObjectClass>& classes,
                  const SceneConfig& config = {});

// Returns a copy with `object_id` moved to `new_pose`. Objects whose footprint
// center leaves table_extent are flagged on_table = false.
Scene apply_motion(const Scene& scene, int object_id, const RigidTransform& new_pose);

// Row-major depth (meters along the optical axis, 0.0 = no return) and label
// images.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depth;
  std::vector<std::int32_t> labels;

  static constexpr std::int32_t kBackground = 0;
  static constexpr std::int32_t kTable = 1;

  double depth_at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
  std::int32_t label_at(int u, int v) const {
    return labels[static_cast<std::size_t>(v) * width + u];
  }
};

// Ray-cast renderer standing in for the RGB-D sensor. `camera_from_table` is
// the Camera <- Table pose.
DepthImage render(const Scene& scene, const RigidTransform& camera_from_table,
                  const PinholeCamera& camera);

// Ray parameter of the first intersection of origin + t * dir with the object
// (Table frame), if any with t > 0.
std::optional<double> intersect_object(const SceneObject& object, const Vec3& origin,
                                       const Vec3& dir);

// Versioned text format (see docs/formats.md).
std::string serialize_scene(const Scene& scene);
Scene parse_scene(const std::string& text);

nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& doc);

}  // namespace assist
