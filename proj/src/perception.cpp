#include "assist/perception.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "assist/error.hpp"
#include "assist/random.hpp"

namespace assist {

NoiseConfig NoiseConfig::from_config(const KeyValueConfig& config) {
  NoiseConfig n;
  n.jitter_px = config.get_double("noise.jitter_px", 0.0);
  n.miss_rate = config.get_double("noise.miss_rate", 0.0);
  n.confusion_rate = config.get_double("noise.confusion_rate", 0.0);
  n.seed = static_cast<std::uint64_t>(config.get_int("noise.seed", 0));
  if (n.jitter_px < 0 || n.miss_rate < 0 || n.miss_rate > 1 || n.confusion_rate < 0 ||
      n.confusion_rate > 1) {
    throw Error(ErrorCode::ConfigError, "noise parameters out of range");
  }
  return n;
}

LocalizationParams LocalizationParams::from_config(const KeyValueConfig& config) {
  LocalizationParams p;
  p.plane_tolerance = config.get_double("perception.plane_tolerance", p.plane_tolerance);
  p.cluster_radius = config.get_double("perception.cluster_radius", p.cluster_radius);
  return p;
}

ClassLookup class_lookup(const Scene& scene) {
  std::map<int, ObjectClass> table;
  for (const auto& o : scene.objects) table.emplace(o.id, o.label);
  return [table](int id) -> std::optional<ObjectClass> {
    const auto it = table.find(id);
    if (it == table.end()) return std::nullopt;
    return it->second;
  };
}

std::vector<Detection2D> detect(const DepthImage& image, const ClassLookup& classes,
                                const NoiseConfig& noise) {
  std::map<int, PixelBox> boxes;
  for (int v = 0; v < image.height; ++v) {
    for (int u = 0; u < image.width; ++u) {
      const int id = image.label_at(u, v);
      if (id <= DepthImage::kTable) continue;
      auto [it, inserted] = boxes.try_emplace(id, PixelBox{u, v, u, v});
      if (!inserted) {
        PixelBox& b = it->second;
        b.u_min = std::min(b.u_min, u);
        b.u_max = std::max(b.u_max, u);
        b.v_min = std::min(b.v_min, v);
        b.v_max = std::max(b.v_max, v);
      }
    }
  }

  Rng rng(noise.seed);
  auto truncated_normal = [&]() {
    double x = rng.normal();
    while (std::abs(x) > 3.0) x = rng.normal();
    return x;
  };

  std::vector<Detection2D> out;
  for (const auto& [id, tight] : boxes) {
    const auto label = classes(id);
    if (!label) continue;
    // Every detection consumes the same number of draws so that changing one
    // rate does not reshuffle the others.
    const bool missed = rng.bernoulli(noise.miss_rate);
    const bool confused = rng.bernoulli(noise.confusion_rate);
    const auto other = static_cast<std::size_t>(rng.index(kAllClasses.size() - 1));
    std::array<double, 4> jitter{};
    for (double& j : jitter) j = truncated_normal() * noise.jitter_px;
    if (missed) continue;

    Detection2D det;
    det.instance = id;
    det.label = *label;
    if (confused) {
      std::vector<ObjectClass> alternatives;
      for (ObjectClass c : kAllClasses) {
        if (c != *label) alternatives.push_back(c);
      }
      det.label = alternatives[other];
    }
    PixelBox b = tight;
    if (noise.jitter_px > 0) {
      b.u_min = std::clamp(tight.u_min + static_cast<int>(std::lround(jitter[0])), 0, image.width - 1);
      b.v_min = std::clamp(tight.v_min + static_cast<int>(std::lround(jitter[1])), 0, image.height - 1);
      b.u_max = std::clamp(tight.u_max + static_cast<int>(std::lround(jitter[2])), 0, image.width - 1);
      b.v_max = std::clamp(tight.v_max + static_cast<int>(std::lround(jitter[3])), 0, image.height - 1);
      if (b.empty()) {
        const int uc = (tight.u_min + tight.u_max) / 2;
        const int vc = (tight.v_min + tight.v_max) / 2;
        b = {uc, vc, uc, vc};
      }
    }
    det.bbox = b;
    const double mean_jitter =
        (std::abs(jitter[0]) + std::abs(jitter[1]) + std::abs(jitter[2]) + std::abs(jitter[3])) / 4;
    det.confidence = (confused ? 0.6 : 1.0) / (1.0 + mean_jitter / 10.0);
    out.push_back(det);
  }
  return out;
}

PointCloud crop_cloud(const DepthImage& image, const PinholeCamera& camera,
                      const RigidTransform& camera_from_table, const PixelBox& bbox) {
  if (bbox.empty() || bbox.u_min < 0 || bbox.v_min < 0 || bbox.u_max >= image.width ||
      bbox.v_max >= image.height) {
    throw Error(ErrorCode::InvalidArgument, "bbox outside image");
  }
  const RigidTransform table_from_camera = camera_from_table.inverse();
  PointCloud cloud;
  cloud.frame = FrameId::Table;
  for (int v = bbox.v_min; v <= bbox.v_max; ++v) {
    for (int u = bbox.u_min; u <= bbox.u_max; ++u) {
      const double d = image.depth_at(u, v);
      if (d <= 0) continue;
      cloud.points.push_back(table_from_camera.apply(camera.backproject(Vec2(u, v), d)));
    }
  }
  if (cloud.empty()) throw Error(ErrorCode::EmptyCrop, "no valid depth inside bbox");
  return cloud;
}

PointCloud remove_plane(const PointCloud& cloud, double z_tol) {
  PointCloud out;
  out.frame = cloud.frame;
  std::copy_if(cloud.points.begin(), cloud.points.end(), std::back_inserter(out.points),
               [z_tol](const Vec3& p) { return p.z() > z_tol; });
  return out;
}

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Keep the smaller index as root.
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

struct CellHash {
  std::size_t operator()(const Eigen::Vector3i& c) const {
    std::size_t h = static_cast<std::size_t>(c.x()) * 73856093u;
    h ^= static_cast<std::size_t>(c.y()) * 19349663u;
    h ^= static_cast<std::size_t>(c.z()) * 83492791u;
    return h;
  }
};

struct CellEq {
  bool operator()(const Eigen::Vector3i& a, const Eigen::Vector3i& b) const { return a == b; }
};

}  // namespace

std::vector<int> connected_components(const std::vector<Vec3>& points, double radius) {
  if (!(radius > 0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  const double r2 = radius * radius;
  std::unordered_map<Eigen::Vector3i, std::vector<int>, CellHash, CellEq> grid;
  auto cell_of = [radius](const Vec3& p) {
    return Eigen::Vector3i(static_cast<int>(std::floor(p.x() / radius)),
                           static_cast<int>(std::floor(p.y() / radius)),
                           static_cast<int>(std::floor(p.z() / radius)));
  };
  DisjointSets sets(points.size());
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    const Eigen::Vector3i c = cell_of(points[i]);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -1; dz <= 1; ++dz) {
          const auto it = grid.find(c + Eigen::Vector3i(dx, dy, dz));
          if (it == grid.end()) continue;
          for (int j : it->second) {
            if ((points[i] - points[j]).squaredNorm() <= r2) sets.unite(i, j);
          }
        }
      }
    }
    grid[c].push_back(i);
  }
  // Number components by first appearance (= lowest member index).
  std::vector<int> label(points.size(), -1);
  std::unordered_map<int, int> root_to_label;
  int next = 0;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    const int root = sets.find(i);
    auto [it, inserted] = root_to_label.try_emplace(root, next);
    if (inserted) ++next;
    label[i] = it->second;
  }
  return label;
}

PointCloud region_grow(const PointCloud& cloud, double radius) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyInput, "region_grow on empty cloud");
  const auto label = connected_components(cloud.points, radius);
  const int count = *std::max_element(label.begin(), label.end()) + 1;
  std::vector<std::size_t> sizes(count, 0);
  for (int l : label) ++sizes[l];
  // Labels are ordered by lowest member index, so the first maximum wins ties.
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  PointCloud out;
  out.frame = cloud.frame;
  out.points.reserve(sizes[best]);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (label[i] == best) out.points.push_back(cloud.points[i]);
  }
  return out;
}

namespace {

Box3D box_at_yaw(const std::vector<Vec3>& points, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const Vec3& p : points) {
    const Vec3 local(c * p.x() + s * p.y(), -s * p.x() + c * p.y(), p.z());
    lo = lo.cwiseMin(local);
    hi = hi.cwiseMax(local);
  }
  const Vec3 mid = (lo + hi) / 2;
  Box3D box;
  box.yaw = yaw;
  box.center = Vec3(c * mid.x() - s * mid.y(), s * mid.x() + c * mid.y(), mid.z());
  box.half_extents = ((hi - lo) / 2).cwiseMax(1e-9);
  return box;
}

}  // namespace

Box3D fit_box3(const PointCloud& cluster) {
  const auto& pts = cluster.points;
  if (pts.size() < 3) throw Error(ErrorCode::DegenerateCluster, "fewer than 3 points");
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : pts) cov += (p - mean) * (p - mean).transpose();
  cov /= static_cast<double>(pts.size());
  const Eigen::SelfAdjointEigenSolver<Mat3> solver3(cov);
  const Vec3 ev = solver3.eigenvalues();  // ascending
  if (!(ev(2) > 0) || ev(1) <= 1e-12 * ev(2)) {
    throw Error(ErrorCode::DegenerateCluster, "points are collinear or coincident");
  }

  const Eigen::Matrix2d cov2 = cov.topLeftCorner<2, 2>();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver2(cov2);
  const Eigen::Vector2d ev2 = solver2.eigenvalues();
  double yaw = 0.0;
  if (ev2(1) - ev2(0) > 1e-9 * (ev2(0) + ev2(1)) && ev2(1) > 0) {
    const Eigen::Vector2d major = solver2.eigenvectors().col(1);
    yaw = wrap_half_pi(std::atan2(major.y(), major.x()));
  }
  Box3D box = box_at_yaw(pts, yaw);
  if (yaw != 0.0) {
    const Box3D aligned = box_at_yaw(pts, 0.0);
    const double area_pca = box.half_extents.x() * box.half_extents.y();
    const double area_aligned = aligned.half_extents.x() * aligned.half_extents.y();
    if (area_aligned < area_pca) box = aligned;
  }
  return box;
}

Box3D localize(const DepthImage& image, const PinholeCamera& camera,
               const RigidTransform& camera_from_table, const PixelBox& bbox,
               const LocalizationParams& params) {
  const PointCloud roi = crop_cloud(image, camera, camera_from_table, bbox);
  const PointCloud above = remove_plane(roi, params.plane_tolerance);
  if (above.empty()) throw Error(ErrorCode::EmptyCrop, "no points above the table plane");
  Box3D box = fit_box3(region_grow(above, params.cluster_radius));
  // Objects rest on the table; sides hidden from the camera still reach it.
  const double top = box.top();
  box.center.z() = top / 2;
  box.half_extents.z() = top / 2;
  return box;
}

}  // namespace assist
