#include <gtest/gtest.h>

#include <algorithm>

#include "assist/error.hpp"
#include "assist/grasp.hpp"
#include "assist/random.hpp"

using namespace assist;

namespace {

Box3D box(double sx, double sy, double sz, double x = 0, double y = 0, double yaw = 0) {
  return {Vec3(x, y, sz / 2), Vec3(sx / 2, sy / 2, sz / 2), yaw};
}

RigidTransform base_from_table(double yaw, const Vec3& t) {
  return RigidTransform::from_yaw(FrameId::RobotBase, FrameId::Table, yaw, t);
}

std::vector<double> thetas(const std::vector<GraspCandidate>& cands) {
  std::vector<double> out;
  for (const auto& c : cands) out.push_back(c.rect.theta);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(ProposeGrasps, TopCandidateCrossesNarrowAxis) {
  const auto cands = propose_grasps(box(0.02, 0.10, 0.05), 0.08);
  ASSERT_FALSE(cands.empty());
  EXPECT_NEAR(cands[0].rect.theta, 0.0, 1e-12);
  EXPECT_NEAR(cands[0].rect.w, 0.02 + 0.01, 1e-12);
  // Independent enumeration: the best theta minimizes the ellipse width.
  double best_w = 1e9;
  for (int k = 0; k < 16; ++k) {
    const double t = -M_PI / 2 + (k + 1) * M_PI / 16;
    best_w = std::min(best_w, 2 * std::hypot(0.01 * std::cos(t), 0.05 * std::sin(t)));
  }
  EXPECT_NEAR(cands[0].rect.w - 0.01, best_w, 1e-12);
}

TEST(ProposeGrasps, RoundBoxGivesEqualConfidence) {
  const auto cands = propose_grasps(box(0.05, 0.05, 0.05), 0.08);
  ASSERT_EQ(cands.size(), 16u);
  for (const auto& c : cands) EXPECT_EQ(c.confidence, cands[0].confidence);
  EXPECT_EQ(cands[0].rect.theta, 0.0);
}

TEST(ProposeGrasps, TooWideFails) {
  try {
    propose_grasps(box(0.12, 0.12, 0.05), 0.08);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoFeasibleGrasp);
  }
}

TEST(ProposeGrasps, SortedAndWellFormed) {
  Rng rng(30);
  for (int i = 0; i < 200; ++i) {
    const Box3D b = box(rng.uniform(0.01, 0.07), rng.uniform(0.01, 0.2), rng.uniform(0.005, 0.1),
                        rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2), rng.uniform(-1.5, 1.5));
    const auto cands = propose_grasps(b, 0.10);
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const auto& r = cands[k].rect;
      EXPECT_GT(r.w, 0);
      EXPECT_GT(r.h, 0);
      EXPECT_GT(r.theta, -M_PI / 2);
      EXPECT_LE(r.theta, M_PI / 2);
      EXPECT_EQ(r.x, b.center.x());
      EXPECT_EQ(r.y, b.center.y());
      EXPECT_GE(cands[k].confidence, 0);
      EXPECT_LE(cands[k].confidence, 1);
      if (k > 0) EXPECT_GE(cands[k - 1].confidence, cands[k].confidence);
    }
    // Confidence never rises with the required opening.
    for (std::size_t a = 0; a < cands.size(); ++a) {
      for (std::size_t c = 0; c < cands.size(); ++c) {
        if (cands[a].rect.w < cands[c].rect.w) EXPECT_GE(cands[a].confidence, cands[c].confidence);
      }
    }
    // Top candidate grasps across the minor axis.
    const double minor = 2 * std::min(b.half_extents.x(), b.half_extents.y());
    EXPECT_NEAR(cands[0].rect.w, minor + 0.01, 1e-12);
  }
}

TEST(ProposeGrasps, TranslationEquivariance) {
  const Box3D a = box(0.03, 0.08, 0.04, 0.0, 0.0, 0.3);
  const Box3D b = box(0.03, 0.08, 0.04, 0.12, -0.07, 0.3);
  const auto ca = propose_grasps(a, 0.10), cb = propose_grasps(b, 0.10);
  ASSERT_EQ(ca.size(), cb.size());
  for (std::size_t k = 0; k < ca.size(); ++k) {
    EXPECT_NEAR(cb[k].rect.x - ca[k].rect.x, 0.12, 1e-12);
    EXPECT_NEAR(cb[k].rect.y - ca[k].rect.y, -0.07, 1e-12);
    EXPECT_EQ(cb[k].rect.theta, ca[k].rect.theta);
  }
}

TEST(ProposeGrasps, RotationShiftsTheta) {
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    const double phi = rng.uniform(-3, 3);
    const Box3D a = box(0.03, 0.08, 0.04, 0, 0, 0.2);
    const Box3D b = box(0.03, 0.08, 0.04, 0, 0, wrap_half_pi(0.2 + phi));
    std::vector<double> shifted;
    for (double t : thetas(propose_grasps(a, 0.10))) shifted.push_back(wrap_half_pi(t + phi));
    std::sort(shifted.begin(), shifted.end());
    const auto got = thetas(propose_grasps(b, 0.10));
    ASSERT_EQ(got.size(), shifted.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      // Wrapping can put one angle at either end of the interval.
      EXPECT_NEAR(std::abs(wrap_half_pi(got[k] - shifted[k])), 0.0, 1e-9);
    }
  }
}

TEST(LiftToPose, ThetaZeroAtOrigin) {
  const Box3D b = box(0.04, 0.04, 0.06);
  const GraspCandidate c{{0, 0, 0.05, 0.02, 0}, 1.0};
  const auto t = base_from_table(0.4, Vec3(0.1, 0.5, -0.02));
  const GraspPose6D g = lift_to_pose(c, b, t);
  EXPECT_TRUE(g.pose.translation().isApprox(t.apply(Vec3(0, 0, 0.06 - 0.01)), 1e-12));
  EXPECT_TRUE(g.pose.rotate(Vec3::UnitX()).isApprox(t.rotate(Vec3::UnitX()), 1e-12));
  EXPECT_NEAR(g.approach.norm(), 1.0, 1e-9);
  EXPECT_TRUE(g.approach.isApprox(t.rotate(-Vec3::UnitZ()), 1e-12));
  EXPECT_EQ(g.opening, 0.05);
}

TEST(LiftToPose, QuarterPiClosingAxis) {
  const Box3D b = box(0.04, 0.04, 0.06);
  const GraspCandidate c{{0, 0, 0.05, 0.02, M_PI / 4}, 1.0};
  const auto ident = base_from_table(0, Vec3::Zero());
  const Vec3 axis = lift_to_pose(c, b, ident).pose.rotate(Vec3::UnitX());
  EXPECT_TRUE(axis.isApprox(Vec3(M_SQRT1_2, M_SQRT1_2, 0), 1e-12));
}

TEST(LiftToPose, GraspHeightUsesShallowerOfPadAndBox) {
  const GraspCandidate c{{0, 0, 0.05, 0.02, 0}, 1.0};
  const auto ident = base_from_table(0, Vec3::Zero());
  // Flat object: half height 0.004 < pad/2.
  EXPECT_NEAR(lift_to_pose(c, box(0.04, 0.04, 0.008), ident).pose.translation().z(), 0.004, 1e-12);
}

TEST(LiftToPose, EquivariantInBaseTransform) {
  const Box3D b = box(0.03, 0.08, 0.04, 0.1, -0.05, 0.3);
  const auto cand = propose_grasps(b, 0.10).front();
  const auto t1 = base_from_table(0.0, Vec3(0, 0.5, 0));
  const auto t2 = base_from_table(-1.2, Vec3(0.3, -0.1, 0.05));
  const auto g1 = lift_to_pose(cand, b, t1), g2 = lift_to_pose(cand, b, t2);
  // g2 = t2 * t1^-1 * g1
  const auto rel = compose(t2, t1.inverse());
  const auto expected = compose(rel, g1.pose);
  EXPECT_LT((expected.translation() - g2.pose.translation()).norm(), 1e-12);
  EXPECT_LT(rotation_angle_between(expected.rotation(), g2.pose.rotation()), 1e-9);
}

TEST(LiftToPose, RejectsWrongFrames) {
  const auto wrong = RigidTransform::identity(FrameId::Table);
  EXPECT_THROW(lift_to_pose(GraspCandidate{{0, 0, 0.05, 0.02, 0}, 1}, box(0.04, 0.04, 0.04), wrong), Error);
}

TEST(WidthAlong, ExactOnAxes) {
  const Box3D b = box(0.02, 0.10, 0.05, 0, 0, 0.5);
  EXPECT_NEAR(width_along(b, 0.5), 0.02, 1e-15);
  EXPECT_NEAR(width_along(b, 0.5 + M_PI / 2), 0.10, 1e-15);
}

TEST(TopDownRotation, IsProperAndPointsDown) {
  for (double t : {-1.2, 0.0, 0.7, M_PI / 2}) {
    const Mat3 r = top_down_rotation(t);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    EXPECT_TRUE((r * Vec3::UnitZ()).isApprox(-Vec3::UnitZ(), 1e-12));
  }
}
