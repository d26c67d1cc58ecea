#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "assist/error.hpp"
#include "assist/perception.hpp"
#include "support/oracles.hpp"

using namespace assist;

namespace {

const PinholeCamera kCam(500, 500, 319.5, 239.5, 640, 480);
const RigidTransform kView = look_at(Vec3(0, 0.15, 0.95), Vec3(0, -0.05, 0));

Scene scene_of(std::vector<SceneObject> objects) {
  Scene s;
  s.table_extent = {-0.6, 0.6, -0.4, 0.4};
  s.reachable_region = {-0.35, 0.35, -0.25, 0.25};
  s.objects = std::move(objects);
  return s;
}

SceneObject plain_box(int id, double sx, double sy, double sz, double x, double y, double yaw) {
  SceneObject o = make_object(ObjectClass::Stapler, id, x, y, yaw);
  o.parts = {Primitive{PrimitiveKind::Box, Vec3(sx, sy, sz), Vec3(0, 0, sz / 2)}};
  return o;
}

PixelBox full_image() { return {0, 0, kCam.width() - 1, kCam.height() - 1}; }

std::vector<Vec3> blob(Rng& rng, const Vec3& center, double spread, int n) {
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) {
    pts.push_back(center + Vec3(rng.uniform(-spread, spread), rng.uniform(-spread, spread),
                                rng.uniform(-spread, spread)));
  }
  return pts;
}

std::vector<Vec3> sorted(std::vector<Vec3> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec3& a, const Vec3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  });
  return pts;
}

bool inside(const Box3D& box, const Vec3& p, double tol) { return oracle::box_distance(box, p) <= tol; }

}  // namespace

TEST(Detect, ZeroNoiseGivesTightBoxes) {
  const Scene s = scene_of({make_object(ObjectClass::Ball, 2, -0.15, 0, 0),
                            make_object(ObjectClass::Tape, 3, 0.0, 0.05, 0),
                            make_object(ObjectClass::Bowl, 4, 0.18, -0.1, 0)});
  const DepthImage img = render(s, kView, kCam);
  const auto dets = detect(img, class_lookup(s), NoiseConfig{});
  ASSERT_EQ(dets.size(), 3u);
  for (const auto& d : dets) {
    PixelBox tight{img.width, img.height, -1, -1};
    for (int v = 0; v < img.height; ++v) {
      for (int u = 0; u < img.width; ++u) {
        if (img.label_at(u, v) != d.instance) continue;
        tight = {std::min(tight.u_min, u), std::min(tight.v_min, v), std::max(tight.u_max, u),
                 std::max(tight.v_max, v)};
      }
    }
    EXPECT_EQ(d.bbox, tight);
    EXPECT_EQ(d.confidence, 1.0);
    EXPECT_EQ(d.label, s.at(d.instance).label);
  }
}

TEST(Detect, MissRateOneGivesNothing) {
  const Scene s = spawn_scene(4, {ObjectClass::Ball, ObjectClass::Spoon, ObjectClass::Tape});
  NoiseConfig n;
  n.miss_rate = 1.0;
  EXPECT_TRUE(detect(render(s, kView, kCam), class_lookup(s), n).empty());
}

TEST(Detect, JitterStaysWithinThreeSigma) {
  const Scene s = scene_of({make_object(ObjectClass::Bowl, 2, 0, 0, 0)});
  const DepthImage img = render(s, kView, kCam);
  const PixelBox tight = detect(img, class_lookup(s), NoiseConfig{}).at(0).bbox;
  int moved = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    NoiseConfig n;
    n.jitter_px = 2.0;
    n.seed = seed;
    const auto dets = detect(img, class_lookup(s), n);
    ASSERT_EQ(dets.size(), 1u);
    const PixelBox& b = dets[0].bbox;
    EXPECT_LE(std::abs(b.u_min - tight.u_min), 6);
    EXPECT_LE(std::abs(b.v_min - tight.v_min), 6);
    EXPECT_LE(std::abs(b.u_max - tight.u_max), 6);
    EXPECT_LE(std::abs(b.v_max - tight.v_max), 6);
    EXPECT_GE(dets[0].confidence, 0.0);
    EXPECT_LE(dets[0].confidence, 1.0);
    if (!(b == tight)) ++moved;
  }
  EXPECT_GT(moved, 50);
}

TEST(Detect, ConfusionRateOneRelabelsEverything) {
  const Scene s = spawn_scene(6, {ObjectClass::Ball, ObjectClass::Pliers});
  NoiseConfig n;
  n.confusion_rate = 1.0;
  for (const auto& d : detect(render(s, kView, kCam), class_lookup(s), n)) {
    EXPECT_NE(d.label, s.at(d.instance).label);
  }
}

TEST(CropCloud, NoReturnBoxFails) {
  const auto up = RigidTransform::from_matrix(FrameId::Camera, FrameId::Table, Mat3::Identity(), Vec3(0, 0, -1));
  const DepthImage img = render(scene_of({}), up, kCam);
  try {
    crop_cloud(img, kCam, up, {10, 10, 20, 20});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCrop);
  }
}

TEST(CropCloud, PointsLieOnBoxOrTable) {
  const Scene s = scene_of({plain_box(2, 0.04, 0.20, 0.05, 0.02, -0.03, 0.5)});
  const DepthImage img = render(s, kView, kCam);
  const Box3D truth = s.objects[0].bounding_box();
  const PointCloud cloud = crop_cloud(img, kCam, kView, detect(img, class_lookup(s), {}).at(0).bbox);
  ASSERT_FALSE(cloud.empty());
  for (const Vec3& p : cloud.points) {
    const double on_table = std::abs(p.z());
    const Vec3 half = truth.half_extents;
    const double c = std::cos(truth.yaw), sn = std::sin(truth.yaw);
    const Vec3 d = p - truth.center;
    const Vec3 local(c * d.x() + sn * d.y(), -sn * d.x() + c * d.y(), d.z());
    const Vec3 q = local.cwiseAbs() - half;
    const double surface = q.maxCoeff() > 0 ? q.cwiseMax(0.0).norm() : -q.maxCoeff();
    EXPECT_LT(std::min(on_table, surface), 1e-4);
  }
}

TEST(CropCloud, FullImageCountsNonzeroDepth) {
  const Scene s = spawn_scene(2, {ObjectClass::Banana, ObjectClass::Scissor});
  const DepthImage img = render(s, kView, kCam);
  const auto nonzero = std::count_if(img.depth.begin(), img.depth.end(), [](double d) { return d > 0; });
  EXPECT_EQ(static_cast<long>(crop_cloud(img, kCam, kView, full_image()).size()), nonzero);
}

TEST(RemovePlane, FlatCloudEmpties) {
  PointCloud c;
  for (int i = 0; i < 50; ++i) c.points.emplace_back(i * 0.01, 0.0, 0.0);
  EXPECT_TRUE(remove_plane(c, 0.005).empty());
}

TEST(RemovePlane, MatchesIndependentFilterAndIsIdempotent) {
  Rng rng(12);
  PointCloud c;
  for (int i = 0; i < 2000; ++i) c.points.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.01, 0.05));
  std::vector<Vec3> expected;
  for (const Vec3& p : c.points) {
    if (p.z() > 0.005) expected.push_back(p);
  }
  const PointCloud once = remove_plane(c, 0.005);
  EXPECT_EQ(once.points, expected);
  EXPECT_EQ(remove_plane(once, 0.005).points, once.points);
}

TEST(RemovePlane, ZeroToleranceKeepsPositiveCloud) {
  Rng rng(13);
  PointCloud c;
  for (int i = 0; i < 100; ++i) c.points.emplace_back(0, 0, rng.uniform(1e-6, 1));
  EXPECT_EQ(remove_plane(c, 0.0).points, c.points);
}

TEST(RegionGrow, TwoClustersPicksLarger) {
  Rng rng(14);
  const double r = 0.01;
  std::vector<Vec3> small = blob(rng, Vec3(0, 0, 0.1), 0.01, 40);
  std::vector<Vec3> big = blob(rng, Vec3(0.1, 0, 0.1), 0.01, 100);
  PointCloud c;
  c.points = small;
  c.points.insert(c.points.end(), big.begin(), big.end());
  const PointCloud out = region_grow(c, r);
  std::vector<Vec3> expected;
  for (int i : oracle::largest_component(c.points, r)) expected.push_back(c.points[i]);
  EXPECT_EQ(out.points, expected);
  EXPECT_EQ(out.size(), 100u);
}

TEST(RegionGrow, SinglePoint) {
  PointCloud c;
  c.points = {Vec3(1, 2, 3)};
  EXPECT_EQ(region_grow(c, 0.01).points, c.points);
}

TEST(RegionGrow, TieGoesToPointZero) {
  PointCloud c;
  c.points = {Vec3(1, 0, 0), Vec3(0, 0, 0), Vec3(1.005, 0, 0), Vec3(0.005, 0, 0)};
  const PointCloud out = region_grow(c, 0.01);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out.points[0], Vec3(1, 0, 0));
}

TEST(RegionGrow, EmptyInputFails) {
  try {
    region_grow(PointCloud{}, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
}

TEST(RegionGrow, MatchesBruteForceOnRandomClouds) {
  Rng rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(400));
    const int blobs = 1 + static_cast<int>(rng.index(5));
    PointCloud c;
    for (int i = 0; i < n; ++i) {
      const double cx = 0.05 * static_cast<double>(rng.index(blobs));
      c.points.emplace_back(cx + rng.uniform(0, 0.03), rng.uniform(0, 0.03), rng.uniform(0, 0.02));
    }
    std::vector<Vec3> expected;
    for (int i : oracle::largest_component(c.points, 0.01)) expected.push_back(c.points[i]);
    ASSERT_EQ(region_grow(c, 0.01).points, expected) << trial;
  }
}

TEST(RegionGrow, PermutationInvariantForUniqueLargest) {
  Rng rng(16);
  PointCloud c;
  c.points = blob(rng, Vec3(0, 0, 0), 0.02, 150);
  const auto extra = blob(rng, Vec3(0.5, 0, 0), 0.01, 30);
  c.points.insert(c.points.end(), extra.begin(), extra.end());
  const auto base = sorted(region_grow(c, 0.01).points);
  for (int k = 0; k < 5; ++k) {
    PointCloud p = c;
    for (std::size_t i = p.points.size() - 1; i > 0; --i) std::swap(p.points[i], p.points[rng.index(i + 1)]);
    EXPECT_EQ(sorted(region_grow(p, 0.01).points), base);
  }
}

TEST(ConnectedComponents, AgreesWithOracle) {
  Rng rng(17);
  std::vector<Vec3> pts;
  for (int i = 0; i < 300; ++i) pts.emplace_back(rng.uniform(0, 0.2), rng.uniform(0, 0.2), 0);
  const auto labels = connected_components(pts, 0.012);
  for (const auto& comp : oracle::components(pts, 0.012)) {
    for (int i : comp) EXPECT_EQ(labels[i], labels[comp.front()]);
  }
  EXPECT_EQ(*std::max_element(labels.begin(), labels.end()) + 1,
            static_cast<int>(oracle::components(pts, 0.012).size()));
}

TEST(FitBox3, UnitSquare) {
  PointCloud c;
  for (double x : {-0.5, 0.5}) {
    for (double y : {-0.5, 0.5}) {
      for (double z : {0.0, 1.0}) c.points.emplace_back(x, y, z);
    }
  }
  const Box3D b = fit_box3(c);
  EXPECT_NEAR(b.yaw, 0.0, 1e-9);
  EXPECT_TRUE(b.half_extents.isApprox(Vec3(0.5, 0.5, 0.5), 1e-9));
  EXPECT_TRUE(b.center.isApprox(Vec3(0, 0, 0.5), 1e-9));
}

TEST(FitBox3, CollinearFails) {
  PointCloud c;
  for (int i = 0; i < 10; ++i) c.points.emplace_back(i * 0.01, i * 0.02, 0.01);
  try {
    fit_box3(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateCluster);
  }
}

TEST(FitBox3, EnclosesAllPointsAndBeatsAxisAligned) {
  Rng rng(18);
  for (int trial = 0; trial < 50; ++trial) {
    PointCloud c = {blob(rng, Vec3(0, 0, 0.05), 0.03, 200), FrameId::Table};
    const double yaw = rng.uniform(-1.5, 1.5);
    for (Vec3& p : c.points) {
      p.x() *= 3;
      p = Vec3(std::cos(yaw) * p.x() - std::sin(yaw) * p.y(), std::sin(yaw) * p.x() + std::cos(yaw) * p.y(), p.z());
    }
    const Box3D b = fit_box3(c);
    EXPECT_GT(b.yaw, -M_PI / 2);
    EXPECT_LE(b.yaw, M_PI / 2);
    for (const Vec3& p : c.points) EXPECT_TRUE(inside(b, p, 1e-9));
    Vec3 lo = c.points[0], hi = c.points[0];
    for (const Vec3& p : c.points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    EXPECT_LE(b.half_extents.prod() * 8, (hi - lo).prod() * (1 + 1e-12));
  }
}

TEST(FitBox3, RenderedRotatedBox) {
  const double yaw = 30 * M_PI / 180;
  const Scene s = scene_of({plain_box(2, 0.04, 0.20, 0.05, 0.0, -0.05, yaw)});
  const DepthImage img = render(s, kView, kCam);
  const PixelBox bbox = detect(img, class_lookup(s), {}).at(0).bbox;
  const PointCloud cluster = region_grow(remove_plane(crop_cloud(img, kCam, kView, bbox), 0.005), 0.01);
  const Box3D b = fit_box3(cluster);
  // The fitted axes may come out swapped; compare in the matching order.
  const double d0 = std::abs(wrap_half_pi(b.yaw - yaw));
  const double d1 = std::abs(wrap_half_pi(b.yaw - yaw + M_PI / 2));
  Vec2 ext = 2 * b.half_extents.head<2>();
  if (d1 < d0) std::swap(ext.x(), ext.y());
  EXPECT_LT(std::min(d0, d1), 3 * M_PI / 180);
  EXPECT_NEAR(ext.x(), 0.04, 0.01);
  EXPECT_NEAR(ext.y(), 0.20, 0.01);
}

TEST(Localize, RecoversFootprintOfEveryClass) {
  Rng rng(19);
  for (ObjectClass c : kAllClasses) {
    for (int k = 0; k < 3; ++k) {
      const double x = rng.uniform(-0.2, 0.2), y = rng.uniform(-0.15, 0.15), yaw = rng.uniform(-1.5, 1.5);
      const Scene s = scene_of({make_object(c, 2, x, y, yaw)});
      const DepthImage img = render(s, kView, kCam);
      const Box3D b = localize(img, kCam, kView, detect(img, class_lookup(s), {}).at(0).bbox);
      const Box3D truth = s.objects[0].bounding_box();
      EXPECT_LT((b.center.head<2>() - truth.center.head<2>()).norm(), 0.01) << to_string(c);
      const double h = truth.half_extents.x(), w = truth.half_extents.y();
      if (std::abs(h - w) > 0.005) {
        const double err = std::min(std::abs(wrap_half_pi(b.yaw - truth.yaw)),
                                    std::abs(wrap_half_pi(b.yaw - truth.yaw + M_PI / 2)));
        EXPECT_LT(err, 5 * M_PI / 180) << to_string(c);
      }
      EXPECT_NEAR(b.center.z() - b.half_extents.z(), 0.0, 1e-9) << to_string(c);
    }
  }
}
