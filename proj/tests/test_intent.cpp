#include <gtest/gtest.h>

#include "assist/error.hpp"
#include "assist/intent.hpp"
#include "assist/random.hpp"

using namespace assist;

namespace {

const PinholeCamera kCam(500, 500, 319.5, 239.5, 640, 480);

MarkerView view() { return {kCam, look_at(Vec3(0, 0.15, 0.95), Vec3(0, -0.05, 0))}; }

Detection2D det(int id, ObjectClass c, int u_min) { return {c, {u_min, 100, u_min + 20, 130}, 1.0, id}; }

SessionState menu_state(int items) {
  std::vector<Detection2D> d;
  for (int i = 0; i < items; ++i) d.push_back(det(2 + i, ObjectClass::Ball, 50 + 60 * i));
  return on_menu(SessionState{}, build_menu(d));
}

SessionState run(SessionState s, std::initializer_list<UserCommand> cmds) {
  for (const auto& c : cmds) s = step(s, c, view()).state;
  return s;
}

}  // namespace

TEST(BuildMenu, LeftToRight) {
  const MenuState m = build_menu({det(4, ObjectClass::Bowl, 300), det(2, ObjectClass::Ball, 20), det(3, ObjectClass::Tape, 150)});
  ASSERT_EQ(m.items.size(), 3u);
  EXPECT_EQ(m.items[0].object_id, 2);
  EXPECT_EQ(m.items[1].object_id, 3);
  EXPECT_EQ(m.items[2].object_id, 4);
  EXPECT_EQ(m.highlighted, 0);
  for (const auto& it : m.items) {
    ASSERT_EQ(it.actions.size(), 1u);
    EXPECT_EQ(it.actions[0], Affordance::Pick);
  }
}

TEST(BuildMenu, EmptyKeepsIdle) {
  const MenuState m = build_menu({});
  EXPECT_TRUE(m.items.empty());
  EXPECT_EQ(on_menu(SessionState{}, m).phase, TaskPhase::Idle);
}

TEST(BuildMenu, DuplicateLabelsStayDistinct) {
  const MenuState m = build_menu({det(5, ObjectClass::Ball, 100), det(6, ObjectClass::Ball, 100)});
  ASSERT_EQ(m.items.size(), 2u);
  EXPECT_NE(m.items[0].object_id, m.items[1].object_id);
  EXPECT_EQ(m.items[0].label, m.items[1].label);
}

TEST(Step, NominalPickAndPlaceCountsTwo) {
  SessionState s = menu_state(3);
  ASSERT_EQ(s.phase, TaskPhase::ObjectMenu);
  s = run(s, {UserCommand::right()});
  auto r = step(s, UserCommand::select(), view());
  EXPECT_EQ(r.state.phase, TaskPhase::ActionMenu);
  EXPECT_FALSE(r.action);
  r = step(r.state, UserCommand::select(), view());
  ASSERT_TRUE(r.action);
  EXPECT_EQ(r.action->kind, RobotAction::Kind::Pick);
  EXPECT_EQ(r.action->object_id, 3);
  EXPECT_EQ(r.state.phase, TaskPhase::Picking);
  s = on_pick_result(r.state, true, view());
  EXPECT_EQ(s.phase, TaskPhase::PlacePointing);
  EXPECT_EQ(s.marker.pixel, kCam.center());
  s = run(s, {UserCommand::marker_move(40, -10), UserCommand::marker_move(5, 5)});
  r = step(s, UserCommand::select(), view());
  ASSERT_TRUE(r.action);
  EXPECT_EQ(r.action->kind, RobotAction::Kind::Place);
  EXPECT_EQ(r.action->object_id, 3);
  EXPECT_TRUE(r.action->target.isApprox(s.marker.table_point));
  s = on_place_result(r.state, true);
  EXPECT_EQ(s.phase, TaskPhase::Done);
  EXPECT_EQ(s.counted_commands, 2);
  EXPECT_EQ(s.total_commands, 4);
}

TEST(Step, RightWrapsToFirst) {
  SessionState s = run(menu_state(3), {UserCommand::right(), UserCommand::right()});
  EXPECT_EQ(s.menu.highlighted, 2);
  s = run(s, {UserCommand::right()});
  EXPECT_EQ(s.menu.highlighted, 0);
  s = run(s, {UserCommand::left()});
  EXPECT_EQ(s.menu.highlighted, 2);
}

TEST(Step, SelectInIdleOnlyWarns) {
  const SessionState idle;
  const auto r = step(idle, UserCommand::select(), view());
  EXPECT_TRUE(r.state.warning);
  EXPECT_FALSE(r.action);
  EXPECT_EQ(r.state.phase, TaskPhase::Idle);
  EXPECT_EQ(r.state.total_commands, 0);
  EXPECT_EQ(r.state.counted_commands, 0);
}

TEST(Step, IllegalCommandsLeaveStateUnchanged) {
  const SessionState s = menu_state(2);
  for (const UserCommand& c : {UserCommand::back(), UserCommand::marker_move(3, 3)}) {
    const auto r = step(s, c, view());
    EXPECT_TRUE(r.state.warning);
    EXPECT_EQ(r.state.phase, s.phase);
    EXPECT_EQ(r.state.total_commands, s.total_commands);
    EXPECT_EQ(r.state.menu.highlighted, s.menu.highlighted);
  }
  // The warning clears on the next legal command.
  const auto bad = step(s, UserCommand::back(), view());
  EXPECT_FALSE(step(bad.state, UserCommand::right(), view()).state.warning);
}

TEST(Step, BackRetreatsOneLevel) {
  SessionState s = run(menu_state(2), {UserCommand::right(), UserCommand::select()});
  ASSERT_EQ(s.phase, TaskPhase::ActionMenu);
  s = run(s, {UserCommand::back()});
  EXPECT_EQ(s.phase, TaskPhase::ObjectMenu);
  EXPECT_FALSE(s.selected_object);
  EXPECT_EQ(s.menu.highlighted, 1);
  EXPECT_EQ(s.counted_commands, 0);
}

TEST(Step, NoCommandsWhileRobotMoves) {
  const SessionState picking = run(menu_state(1), {UserCommand::select(), UserCommand::select()});
  ASSERT_EQ(picking.phase, TaskPhase::Picking);
  for (const UserCommand& c : {UserCommand::left(), UserCommand::select(), UserCommand::back()}) {
    const auto r = step(picking, c, view());
    EXPECT_TRUE(r.state.warning);
    EXPECT_FALSE(r.action);
    EXPECT_EQ(r.state.phase, TaskPhase::Picking);
  }
}

TEST(Step, PickFailureReturnsToMenu) {
  const SessionState picking = run(menu_state(2), {UserCommand::select(), UserCommand::select()});
  const SessionState s = on_pick_result(picking, false, view());
  EXPECT_EQ(s.phase, TaskPhase::ObjectMenu);
  EXPECT_FALSE(s.held_object);
  EXPECT_EQ(s.counted_commands, 1);
}

TEST(Step, ResultsOutsideTheirPhaseThrow) {
  EXPECT_THROW(on_pick_result(menu_state(1), true, view()), Error);
  EXPECT_THROW(on_place_result(menu_state(1), true), Error);
}

TEST(Step, RandomCommandStreamsNeverPlaceEmptyHanded) {
  Rng rng(60);
  const UserCommand alphabet[] = {UserCommand::left(), UserCommand::right(), UserCommand::select(),
                                  UserCommand::back(), UserCommand::marker_move(10, -5)};
  for (int trial = 0; trial < 200; ++trial) {
    SessionState s = menu_state(1 + static_cast<int>(rng.index(4)));
    int placed = 0;
    for (int k = 0; k < 60 && placed == 0; ++k) {
      const auto r = step(s, alphabet[rng.index(5)], view());
      s = r.state;
      if (s.phase == TaskPhase::Placing) {
        ASSERT_TRUE(s.held_object.has_value());
        ASSERT_TRUE(r.action && r.action->kind == RobotAction::Kind::Place);
        s = on_place_result(s, true);
        placed = 1;
      } else if (s.phase == TaskPhase::Picking) {
        s = on_pick_result(s, rng.bernoulli(0.7), view());
      }
      ASSERT_LE(s.counted_commands, 2 + 2 * 60);
    }
    if (placed) {
      // Exactly one place and at least one pick.
      EXPECT_GE(s.counted_commands, 2);
    }
  }
}

TEST(Step, MarkerMoveReprojects) {
  SessionState s = on_pick_result(run(menu_state(1), {UserCommand::select(), UserCommand::select()}), true, view());
  s = run(s, {UserCommand::marker_move(-100, 60)});
  EXPECT_EQ(s.marker.pixel, kCam.center() + Vec2(-100, 60));
  EXPECT_TRUE(s.marker.table_point.isApprox(project_marker(s.marker.pixel, kCam, view().camera_from_table), 1e-15));
  s = run(s, {UserCommand::marker_move(-10000, 0)});
  EXPECT_EQ(s.marker.pixel.x(), 0.0);
}

TEST(ProjectMarker, NadirCenterPixel) {
  const PinholeCamera cam(500, 500, 320, 240, 640, 480);
  const auto t = look_at(Vec3(0, 0, 1), Vec3(0, 0, 0));
  EXPECT_LT(project_marker({320, 240}, cam, t).norm(), 1e-12);
}

TEST(ProjectMarker, MatchesClosedForm) {
  Rng rng(61);
  for (int i = 0; i < 200; ++i) {
    const Vec3 eye(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.5, 1.5));
    const auto t = look_at(eye, Vec3(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), 0));
    const Vec2 px(rng.uniform(0, 639), rng.uniform(0, 479));
    // Ray in table frame: R^T K^-1 [u v 1].
    const Vec3 d_cam((px.x() - 319.5) / 500, (px.y() - 239.5) / 500, 1);
    const Vec3 d = t.rotation_matrix().transpose() * d_cam;
    const Vec3 o = -(t.rotation_matrix().transpose() * t.translation());
    const Vec3 expected = o - (o.z() / d.z()) * d;
    const Vec3 got = project_marker(px, kCam, t);
    EXPECT_LT((got - Vec3(expected.x(), expected.y(), 0)).norm(), 1e-9);
  }
}

TEST(ProjectMarker, HorizontalCameraIsParallel) {
  const PinholeCamera cam(500, 500, 320, 240, 640, 480);
  const auto t = look_at(Vec3(0, 0, 0.5), Vec3(1, 0, 0.5));
  try {
    project_marker({320, 240}, cam, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParallelRay);
  }
}

TEST(Names, RoundTrip) {
  for (CommandKind k : {CommandKind::Left, CommandKind::Right, CommandKind::Select, CommandKind::Back, CommandKind::MarkerMove}) {
    EXPECT_EQ(command_from_string(to_string(k)), k);
  }
  for (TaskPhase p : {TaskPhase::Idle, TaskPhase::ObjectMenu, TaskPhase::ActionMenu, TaskPhase::Picking,
                      TaskPhase::PlacePointing, TaskPhase::Placing, TaskPhase::Done, TaskPhase::Failed}) {
    EXPECT_EQ(phase_from_string(to_string(p)), p);
  }
  EXPECT_THROW(command_from_string("JUMP"), Error);
}
