#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "assist/config.hpp"
#include "assist/geometry.hpp"
#include "assist/scene.hpp"

namespace assist {

// Inclusive pixel rectangle.
struct PixelBox {
  int u_min = 0, v_min = 0, u_max = 0, v_max = 0;

  bool empty() const { return u_max < u_min || v_max < v_min; }
  bool operator==(const PixelBox&) const = default;
};

struct Detection2D {
  ObjectClass label = ObjectClass::Ball;
  PixelBox bbox;
  double confidence = 1.0;
  // Detector-assigned instance id. The label-image oracle reports the scene
  // object id, which is what menus use to tell duplicate classes apart.
  int instance = 0;
};

// Artifact-defined detector error model.
//   jitter_px:      sigma of a 3-sigma-truncated Gaussian added to each bbox edge
//   miss_rate:      probability a visible object is not reported
//   confusion_rate: probability the reported class is replaced by another one
struct NoiseConfig {
  double jitter_px = 0.0;
  double miss_rate = 0.0;
  double confusion_rate = 0.0;
  std::uint64_t seed = 0;

  bool zero() const { return jitter_px == 0 && miss_rate == 0 && confusion_rate == 0; }
  static NoiseConfig from_config(const KeyValueConfig& config);
};

struct PointCloud {
  std::vector<Vec3> points;
  FrameId frame = FrameId::Table;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Maps a label-image object id to its class (the detector oracle's "knowledge").
using ClassLookup = std::function<std::optional<ObjectClass>(int)>;
ClassLookup class_lookup(const Scene& scene);

// Detector oracle: one detection per visible object id in the label image,
// sorted by id, with the tight label bbox and confidence 1.0 when noise is zero.
std::vector<Detection2D> detect(const DepthImage& image, const ClassLookup& classes,
                                const NoiseConfig& noise);

// Back-projects every valid-depth pixel in `bbox` and expresses it in the Table
// frame. Throws EmptyCrop if none.
PointCloud crop_cloud(const DepthImage& image, const PinholeCamera& camera,
                      const RigidTransform& camera_from_table, const PixelBox& bbox);

// Keeps points with z > z_tol, preserving order.
PointCloud remove_plane(const PointCloud& cloud, double z_tol);

// Connected components of the graph joining points at distance <= radius.
// Returns the largest (ties: the component containing the lowest point index),
// with points in their original order.
PointCloud region_grow(const PointCloud& cloud, double radius);

// Component index per point (components numbered by lowest member index).
std::vector<int> connected_components(const std::vector<Vec3>& points, double radius);

// Planar-PCA oriented box enclosing all points; falls back to yaw 0 when the
// axis-aligned box has smaller footprint area.
Box3D fit_box3(const PointCloud& cluster);

struct LocalizationParams {
  double plane_tolerance = 0.005;  // m
  double cluster_radius = 0.01;    // m

  static LocalizationParams from_config(const KeyValueConfig& config);
};

// crop -> remove_plane -> region_grow -> fit_box3, with the box bottom
// extended down to the table plane.
Box3D localize(const DepthImage& image, const PinholeCamera& camera,
               const RigidTransform& camera_from_table, const PixelBox& bbox,
               const LocalizationParams& params = {});

}  // namespace assist
