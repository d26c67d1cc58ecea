#include "assist/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "assist/error.hpp"
#include "assist/random.hpp"

namespace assist {

std::string_view to_string(ObjectClass label) {
  switch (label) {
    case ObjectClass::Stapler: return "stapler";
    case ObjectClass::Spoon: return "spoon";
    case ObjectClass::Banana: return "banana";
    case ObjectClass::ScrewDriver: return "screw driver";
    case ObjectClass::Bowl: return "bowl";
    case ObjectClass::Ball: return "ball";
    case ObjectClass::Sunglasses: return "sunglasses";
    case ObjectClass::Pliers: return "pliers";
    case ObjectClass::Scissor: return "scissor";
    case ObjectClass::Tape: return "tape";
  }
  return "unknown";
}

std::string class_token(ObjectClass label) {
  std::string s(to_string(label));
  std::replace(s.begin(), s.end(), ' ', '_');
  return s;
}

ObjectClass class_from_string(std::string_view name) {
  for (ObjectClass c : kAllClasses) {
    if (to_string(c) == name || class_token(c) == name) return c;
  }
  throw Error(ErrorCode::ParseError, "unknown object class '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

Vec2 Footprint::to_local(const Vec2& p) const {
  const Vec2 d = p - center;
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * d.x() + s * d.y(), -s * d.x() + c * d.y()};
}

bool Footprint::contains(const Vec2& p, double tolerance) const {
  const Vec2 local = to_local(p);
  if (round) return local.norm() <= half.x() + tolerance;
  return std::abs(local.x()) <= half.x() + tolerance && std::abs(local.y()) <= half.y() + tolerance;
}

std::pair<double, double> Footprint::project(const Vec2& origin, const Vec2& direction) const {
  const double mid = (center - origin).dot(direction);
  double reach = 0;
  if (round) {
    reach = half.x();
  } else {
    const Vec2 ax(std::cos(yaw), std::sin(yaw));
    const Vec2 ay(-std::sin(yaw), std::cos(yaw));
    reach = half.x() * std::abs(ax.dot(direction)) + half.y() * std::abs(ay.dot(direction));
  }
  return {mid - reach, mid + reach};
}

std::array<Vec2, 4> Footprint::corners() const {
  const Vec2 ax(std::cos(yaw), std::sin(yaw));
  const Vec2 ay(-std::sin(yaw), std::cos(yaw));
  return {center + ax * half.x() + ay * half.y(), center - ax * half.x() + ay * half.y(),
          center - ax * half.x() - ay * half.y(), center + ax * half.x() - ay * half.y()};
}

bool footprints_overlap(const Footprint& a, const Footprint& b, double gap) {
  if (a.round && b.round) return (a.center - b.center).norm() < a.half.x() + b.half.x() + gap;
  // Separating-axis test; round footprints contribute their projection radius.
  std::vector<Vec2> axes;
  for (const Footprint* f : {&a, &b}) {
    if (f->round) continue;
    axes.emplace_back(std::cos(f->yaw), std::sin(f->yaw));
    axes.emplace_back(-std::sin(f->yaw), std::cos(f->yaw));
  }
  if (a.round != b.round) {
    // Axis from the circle center to the closest point of the box.
    const Footprint& box = a.round ? b : a;
    const Footprint& circle = a.round ? a : b;
    const Vec2 local = box.to_local(circle.center);
    const Vec2 clamped(std::clamp(local.x(), -box.half.x(), box.half.x()),
                       std::clamp(local.y(), -box.half.y(), box.half.y()));
    return (local - clamped).norm() < circle.half.x() + gap;
  }
  for (const Vec2& axis : axes) {
    const auto [a0, a1] = a.project(Vec2::Zero(), axis);
    const auto [b0, b1] = b.project(Vec2::Zero(), axis);
    if (a1 + gap <= b0 || b1 + gap <= a0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Vec3 SceneObject::local_min() const {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  for (const auto& p : parts) lo = lo.cwiseMin(p.center - p.size / 2);
  return lo;
}

Vec3 SceneObject::local_max() const {
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());
  for (const auto& p : parts) hi = hi.cwiseMax(p.center + p.size / 2);
  return hi;
}

double SceneObject::yaw() const {
  const Vec3 x = pose.rotate(Vec3::UnitX());
  return std::atan2(x.y(), x.x());
}

Box3D SceneObject::bounding_box() const {
  const Vec3 lo = local_min();
  const Vec3 hi = local_max();
  Box3D box;
  box.center = pose.apply((lo + hi) / 2);
  box.half_extents = (hi - lo) / 2;
  box.yaw = yaw();
  return box;
}

Footprint SceneObject::footprint() const {
  const Box3D box = bounding_box();
  Footprint f;
  f.center = box.center.head<2>();
  f.half = box.half_extents.head<2>();
  f.yaw = box.yaw;
  f.round = parts.size() == 1 && parts.front().kind != PrimitiveKind::Box;
  return f;
}

namespace {

Primitive box(double sx, double sy, double sz, double cx = 0, double cy = 0) {
  return {PrimitiveKind::Box, Vec3(sx, sy, sz), Vec3(cx, cy, sz / 2)};
}

Primitive box_at(double sx, double sy, double sz, double cx, double cy, double cz) {
  return {PrimitiveKind::Box, Vec3(sx, sy, sz), Vec3(cx, cy, cz)};
}

}  // namespace

SceneObject make_object(ObjectClass label, int id, double x, double y, double yaw) {
  SceneObject obj;
  obj.id = id;
  obj.label = label;
  switch (label) {
    case ObjectClass::Stapler:
      obj.parts = {box(0.16, 0.04, 0.05)};
      break;
    case ObjectClass::Spoon:
      obj.parts = {box(0.12, 0.015, 0.012, -0.025), box(0.05, 0.035, 0.012, 0.06)};
      break;
    case ObjectClass::Banana:
      obj.parts = {box(0.18, 0.035, 0.035)};
      break;
    case ObjectClass::ScrewDriver:
      obj.parts = {box(0.10, 0.03, 0.025, -0.04), box_at(0.08, 0.01, 0.01, 0.05, 0, 0.0125)};
      break;
    case ObjectClass::Bowl:
      obj.parts = {{PrimitiveKind::Cylinder, Vec3(0.08, 0.08, 0.05), Vec3(0, 0, 0.025)}};
      break;
    case ObjectClass::Ball:
      obj.parts = {{PrimitiveKind::Sphere, Vec3(0.07, 0.07, 0.07), Vec3(0, 0, 0.035)}};
      break;
    case ObjectClass::Sunglasses:
      obj.parts = {box(0.14, 0.045, 0.03)};
      break;
    case ObjectClass::Pliers:
      // Two parallel jaws/handles.
      obj.parts = {box(0.18, 0.014, 0.015, 0, 0.006), box(0.18, 0.014, 0.015, 0, -0.006)};
      break;
    case ObjectClass::Scissor:
      obj.parts = {box(0.12, 0.012, 0.01, 0.025, 0.007), box(0.12, 0.012, 0.01, 0.025, -0.007),
                   box(0.05, 0.05, 0.01, -0.06)};
      break;
    case ObjectClass::Tape:
      obj.parts = {{PrimitiveKind::Cylinder, Vec3(0.08, 0.08, 0.03), Vec3(0, 0, 0.015)}};
      break;
  }
  // Recenter so the footprint center is the object origin.
  const Vec3 lo = obj.local_min();
  const Vec3 hi = obj.local_max();
  const Vec2 mid = ((lo + hi) / 2).head<2>();
  for (auto& p : obj.parts) p.center.head<2>() -= mid;
  obj.pose = RigidTransform::from_yaw(FrameId::Table, FrameId::Object, yaw, Vec3(x, y, 0));
  const Vec3 extent = obj.local_max() - obj.local_min();
  obj.grasp_width = std::min(extent.x(), extent.y());
  return obj;
}

SceneConfig SceneConfig::from_config(const KeyValueConfig& config) {
  SceneConfig out;
  auto rect = [&](const std::string& key, Rect2 fallback) {
    if (!config.has(key)) return fallback;
    const auto v = config.get_vector(key, 4);
    return Rect2{v[0], v[1], v[2], v[3]};
  };
  out.table_extent = rect("scene.table_extent", out.table_extent);
  out.reachable_region = rect("scene.reachable_region", out.reachable_region);
  out.min_gap = config.get_double("scene.min_gap", out.min_gap);
  out.max_attempts = static_cast<int>(config.get_int("scene.max_attempts", out.max_attempts));
  return out;
}

const SceneObject* Scene::find(int id) const {
  for (const auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

const SceneObject& Scene::at(int id) const {
  if (const auto* o = find(id)) return *o;
  throw Error(ErrorCode::UnknownObject, "no object with id " + std::to_string(id));
}

namespace {

bool footprint_inside(const Footprint& f, const Rect2& region) {
  if (f.round) {
    return f.center.x() - f.half.x() >= region.x_min && f.center.x() + f.half.x() <= region.x_max &&
           f.center.y() - f.half.x() >= region.y_min && f.center.y() + f.half.x() <= region.y_max;
  }
  for (const Vec2& c : f.corners()) {
    if (!region.contains(c)) return false;
  }
  return true;
}

}  // namespace

Scene spawn_scene(std::uint64_t seed, const std::vector<ObjectClass>& classes,
                  const SceneConfig& config) {
  Scene scene;
  scene.table_extent = config.table_extent;
  scene.reachable_region = config.reachable_region;
  scene.rng_seed = seed;
  Rng rng(seed);
  const Rect2& region = config.reachable_region;
  int next_id = 2;
  for (ObjectClass label : classes) {
    bool placed = false;
    for (int attempt = 0; attempt < config.max_attempts && !placed; ++attempt) {
      const double x = rng.uniform(region.x_min, region.x_max);
      const double y = rng.uniform(region.y_min, region.y_max);
      const double yaw = rng.uniform(-M_PI, M_PI);
      SceneObject candidate = make_object(label, next_id, x, y, yaw);
      const Footprint fp = candidate.footprint();
      if (!footprint_inside(fp, region)) continue;
      const bool clash = std::any_of(scene.objects.begin(), scene.objects.end(), [&](const auto& o) {
        return footprints_overlap(fp, o.footprint(), config.min_gap);
      });
      if (clash) continue;
      scene.objects.push_back(std::move(candidate));
      placed = true;
    }
    if (!placed) {
      throw Error(ErrorCode::PlacementFailure,
                  "could not place '" + std::string(to_string(label)) + "' after " +
                      std::to_string(config.max_attempts) + " attempts");
    }
    ++next_id;
  }
  return scene;
}

Scene apply_motion(const Scene& scene, int object_id, const RigidTransform& new_pose) {
  if (new_pose.parent() != FrameId::Table || new_pose.child() != FrameId::Object) {
    throw Error(ErrorCode::FrameMismatch, "object pose must be table<-object");
  }
  Scene out = scene;
  for (auto& o : out.objects) {
    if (o.id != object_id) continue;
    o.pose = new_pose;
    o.on_table = scene.table_extent.contains(o.footprint().center);
    return out;
  }
  throw Error(ErrorCode::UnknownObject, "no object with id " + std::to_string(object_id));
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kNoHit = std::numeric_limits<double>::infinity();

double intersect_box(const Vec3& o, const Vec3& d, const Vec3& center, const Vec3& half) {
  double t0 = -kNoHit, t1 = kNoHit;
  for (int i = 0; i < 3; ++i) {
    const double lo = center[i] - half[i] - o[i];
    const double hi = center[i] + half[i] - o[i];
    if (d[i] == 0.0) {
      if (lo > 0 || hi < 0) return kNoHit;
      continue;
    }
    double a = lo / d[i], b = hi / d[i];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return kNoHit;
  }
  if (t0 > 0) return t0;
  return kNoHit;
}

double intersect_sphere(const Vec3& o, const Vec3& d, const Vec3& center, double r) {
  const Vec3 oc = o - center;
  const double a = d.squaredNorm();
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - r * r;
  const double disc = b * b - a * c;
  if (disc < 0) return kNoHit;
  const double sq = std::sqrt(disc);
  // Numerically stable root pair.
  const double q = -(b + std::copysign(sq, b));
  double t0 = q / a, t1 = c / q;
  if (t0 > t1) std::swap(t0, t1);
  if (t0 > 0) return t0;
  return kNoHit;
}

double intersect_cylinder(const Vec3& o, const Vec3& d, const Vec3& center, double r, double h) {
  double best = kNoHit;
  const double z_lo = center.z() - h / 2, z_hi = center.z() + h / 2;
  const double ox = o.x() - center.x(), oy = o.y() - center.y();
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 0) {
    const double b = ox * d.x() + oy * d.y();
    const double c = ox * ox + oy * oy - r * r;
    const double disc = b * b - a * c;
    if (disc >= 0) {
      const double sq = std::sqrt(disc);
      const double q = -(b + std::copysign(sq, b));
      for (double t : {q / a, c / q}) {
        if (t > 0 && t < best) {
          const double z = o.z() + t * d.z();
          if (z >= z_lo && z <= z_hi) best = t;
        }
      }
    }
  }
  if (d.z() != 0) {
    for (double zc : {z_lo, z_hi}) {
      const double t = (zc - o.z()) / d.z();
      if (t > 0 && t < best) {
        const double x = ox + t * d.x(), y = oy + t * d.y();
        if (x * x + y * y <= r * r) best = t;
      }
    }
  }
  return best;
}

}  // namespace

std::optional<double> intersect_object(const SceneObject& object, const Vec3& origin,
                                       const Vec3& dir) {
  const Quat inv = object.pose.rotation().conjugate();
  const Vec3 o = inv * (origin - object.pose.translation());
  const Vec3 d = inv * dir;
  double best = kNoHit;
  for (const auto& p : object.parts) {
    double t = kNoHit;
    switch (p.kind) {
      case PrimitiveKind::Box: t = intersect_box(o, d, p.center, p.size / 2); break;
      case PrimitiveKind::Sphere: t = intersect_sphere(o, d, p.center, p.radius()); break;
      case PrimitiveKind::Cylinder:
        t = intersect_cylinder(o, d, p.center, p.radius(), p.size.z());
        break;
    }
    best = std::min(best, t);
  }
  if (best == kNoHit) return std::nullopt;
  return best;
}

DepthImage render(const Scene& scene, const RigidTransform& camera_from_table,
                  const PinholeCamera& camera) {
  if (camera_from_table.parent() != FrameId::Camera || camera_from_table.child() != FrameId::Table) {
    throw Error(ErrorCode::FrameMismatch, "render expects a camera<-table pose");
  }
  const RigidTransform table_from_camera = camera_from_table.inverse();
  const Vec3 origin = table_from_camera.translation();

  // Bounding spheres for early rejection.
  struct Bound {
    Vec3 center;
    double radius;
  };
  std::vector<Bound> bounds;
  bounds.reserve(scene.objects.size());
  for (const auto& obj : scene.objects) {
    const Box3D box = obj.bounding_box();
    bounds.push_back({box.center, box.half_extents.norm() + 1e-9});
  }

  DepthImage image;
  image.width = camera.width();
  image.height = camera.height();
  const auto n = static_cast<std::size_t>(image.width) * image.height;
  image.depth.assign(n, 0.0);
  image.labels.assign(n, DepthImage::kBackground);

  for (int v = 0; v < image.height; ++v) {
    for (int u = 0; u < image.width; ++u) {
      // Camera-frame ray has unit z, so the ray parameter is the depth.
      const Vec3 dir = table_from_camera.rotate(camera.ray(Vec2(u, v)));
      double best = kNoHit;
      std::int32_t label = DepthImage::kBackground;
      if (dir.z() < 0) {
        const double t = -origin.z() / dir.z();
        const Vec3 hit = origin + t * dir;
        if (t > 0 && scene.table_extent.contains(hit.head<2>())) {
          best = t;
          label = DepthImage::kTable;
        }
      }
      for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const Vec3 oc = bounds[i].center - origin;
        const double along = oc.dot(dir) / dir.squaredNorm();
        if ((oc - along * dir).norm() > bounds[i].radius) continue;
        if (const auto t = intersect_object(scene.objects[i], origin, dir); t && *t < best) {
          best = *t;
          label = scene.objects[i].id;
        }
      }
      if (label != DepthImage::kBackground) {
        const auto idx = static_cast<std::size_t>(v) * image.width + u;
        image.depth[idx] = best;
        image.labels[idx] = label;
      }
    }
  }
  return image;
}

// ---------------------------------------------------------------------------

namespace {

const char* kind_token(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::Box: return "box";
    case PrimitiveKind::Cylinder: return "cylinder";
    case PrimitiveKind::Sphere: return "sphere";
  }
  return "box";
}

PrimitiveKind kind_from_token(const std::string& token) {
  if (token == "box") return PrimitiveKind::Box;
  if (token == "cylinder") return PrimitiveKind::Cylinder;
  if (token == "sphere") return PrimitiveKind::Sphere;
  throw Error(ErrorCode::ParseError, "unknown primitive '" + token + "'");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string rect_line(const char* key, const Rect2& r) {
  return std::string(key) + " " + num(r.x_min) + " " + num(r.x_max) + " " + num(r.y_min) + " " +
         num(r.y_max) + "\n";
}

}  // namespace

std::string serialize_scene(const Scene& scene) {
  std::string out = "assist-scene 1\n";
  out += "seed " + std::to_string(scene.rng_seed) + "\n";
  out += rect_line("table_extent", scene.table_extent);
  out += rect_line("reachable_region", scene.reachable_region);
  out += "objects " + std::to_string(scene.objects.size()) + "\n";
  for (const auto& o : scene.objects) {
    const Quat& q = o.pose.rotation();
    const Vec3& t = o.pose.translation();
    out += "object " + std::to_string(o.id) + " " + class_token(o.label) + " " +
           num(o.grasp_width) + " " + (o.on_table ? "1" : "0") + " " +
           std::to_string(o.parts.size()) + "\n";
    out += "  pose " + num(q.w()) + " " + num(q.x()) + " " + num(q.y()) + " " + num(q.z()) + " " +
           num(t.x()) + " " + num(t.y()) + " " + num(t.z()) + "\n";
    for (const auto& p : o.parts) {
      out += std::string("  part ") + kind_token(p.kind) + " " + num(p.size.x()) + " " +
             num(p.size.y()) + " " + num(p.size.z()) + " " + num(p.center.x()) + " " +
             num(p.center.y()) + " " + num(p.center.z()) + "\n";
    }
  }
  return out;
}

Scene parse_scene(const std::string& text) {
  std::istringstream in(text);
  auto expect = [&](const std::string& word) {
    std::string got;
    if (!(in >> got) || got != word) {
      throw Error(ErrorCode::ParseError, "scene: expected '" + word + "', got '" + got + "'");
    }
  };
  auto read_num = [&]() {
    std::string token;
    if (!(in >> token)) throw Error(ErrorCode::ParseError, "scene: unexpected end of input");
    try {
      std::size_t used = 0;
      const double v = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "scene: bad number '" + token + "'");
    }
  };
  expect("assist-scene");
  if (read_num() != 1) throw Error(ErrorCode::ParseError, "scene: unsupported version");
  Scene scene;
  expect("seed");
  std::string seed;
  in >> seed;
  scene.rng_seed = std::stoull(seed);
  auto read_rect = [&](const char* key) {
    expect(key);
    Rect2 r;
    r.x_min = read_num();
    r.x_max = read_num();
    r.y_min = read_num();
    r.y_max = read_num();
    return r;
  };
  scene.table_extent = read_rect("table_extent");
  scene.reachable_region = read_rect("reachable_region");
  expect("objects");
  const int count = static_cast<int>(read_num());
  for (int i = 0; i < count; ++i) {
    expect("object");
    SceneObject o;
    o.id = static_cast<int>(read_num());
    std::string label;
    in >> label;
    o.label = class_from_string(label);
    o.grasp_width = read_num();
    o.on_table = read_num() != 0;
    const int parts = static_cast<int>(read_num());
    expect("pose");
    const double qw = read_num(), qx = read_num(), qy = read_num(), qz = read_num();
    const double tx = read_num(), ty = read_num(), tz = read_num();
    o.pose = RigidTransform(FrameId::Table, FrameId::Object, Quat(qw, qx, qy, qz), Vec3(tx, ty, tz));
    for (int j = 0; j < parts; ++j) {
      expect("part");
      std::string kind;
      in >> kind;
      Primitive p;
      p.kind = kind_from_token(kind);
      p.size.x() = read_num();
      p.size.y() = read_num();
      p.size.z() = read_num();
      p.center.x() = read_num();
      p.center.y() = read_num();
      p.center.z() = read_num();
      o.parts.push_back(p);
    }
    scene.objects.push_back(std::move(o));
  }
  return scene;
}

nlohmann::json scene_to_json(const Scene& scene) {
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& o : scene.objects) {
    const Quat& q = o.pose.rotation();
    const Vec3& t = o.pose.translation();
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& p : o.parts) {
      parts.push_back({{"kind", kind_token(p.kind)},
                       {"size", {p.size.x(), p.size.y(), p.size.z()}},
                       {"center", {p.center.x(), p.center.y(), p.center.z()}}});
    }
    const Footprint fp = o.footprint();
    objects.push_back({{"id", o.id},
                       {"label", std::string(to_string(o.label))},
                       {"grasp_width", o.grasp_width},
                       {"on_table", o.on_table},
                       {"rotation", {q.w(), q.x(), q.y(), q.z()}},
                       {"translation", {t.x(), t.y(), t.z()}},
                       {"footprint",
                        {{"center", {fp.center.x(), fp.center.y()}},
                         {"half", {fp.half.x(), fp.half.y()}},
                         {"yaw", fp.yaw},
                         {"round", fp.round}}},
                       {"parts", parts}});
  }
  auto rect = [](const Rect2& r) { return nlohmann::json{r.x_min, r.x_max, r.y_min, r.y_max}; };
  return {{"version", 1},
          {"seed", scene.rng_seed},
          {"table_extent", rect(scene.table_extent)},
          {"reachable_region", rect(scene.reachable_region)},
          {"objects", objects}};
}

Scene scene_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("version").get<int>() != 1) {
      throw Error(ErrorCode::ParseError, "scene: unsupported version");
    }
    auto rect = [](const nlohmann::json& j) {
      return Rect2{j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
                   j.at(3).get<double>()};
    };
    Scene scene;
    scene.rng_seed = doc.at("seed").get<std::uint64_t>();
    scene.table_extent = rect(doc.at("table_extent"));
    scene.reachable_region = rect(doc.at("reachable_region"));
    for (const auto& jo : doc.at("objects")) {
      SceneObject o;
      o.id = jo.at("id").get<int>();
      o.label = class_from_string(jo.at("label").get<std::string>());
      o.grasp_width = jo.at("grasp_width").get<double>();
      o.on_table = jo.at("on_table").get<bool>();
      const auto& q = jo.at("rotation");
      const auto& t = jo.at("translation");
      o.pose = RigidTransform(
          FrameId::Table, FrameId::Object,
          Quat(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(),
               q.at(3).get<double>()),
          Vec3(t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()));
      for (const auto& jp : jo.at("parts")) {
        Primitive p;
        p.kind = kind_from_token(jp.at("kind").get<std::string>());
        const auto& s = jp.at("size");
        const auto& c = jp.at("center");
        p.size = Vec3(s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>());
        p.center = Vec3(c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>());
        o.parts.push_back(p);
      }
      scene.objects.push_back(std::move(o));
    }
    return scene;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("scene json: ") + e.what());
  }
}

}  // namespace assist
