#include "assist/intent.hpp"

#include <algorithm>
#include <cmath>

#include "assist/error.hpp"

namespace assist {

std::string_view to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::Left: return "LEFT";
    case CommandKind::Right: return "RIGHT";
    case CommandKind::Select: return "SELECT";
    case CommandKind::Back: return "BACK";
    case CommandKind::MarkerMove: return "MARKER_MOVE";
  }
  return "?";
}

CommandKind command_from_string(std::string_view name) {
  for (CommandKind k : {CommandKind::Left, CommandKind::Right, CommandKind::Select, CommandKind::Back,
                        CommandKind::MarkerMove}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::ParseError, "unknown command '" + std::string(name) + "'");
}

std::string_view to_string(Affordance a) {
  switch (a) {
    case Affordance::Pick: return "pick";
  }
  return "?";
}

std::string_view to_string(TaskPhase phase) {
  switch (phase) {
    case TaskPhase::Idle: return "Idle";
    case TaskPhase::ObjectMenu: return "ObjectMenu";
    case TaskPhase::ActionMenu: return "ActionMenu";
    case TaskPhase::Picking: return "Picking";
    case TaskPhase::PlacePointing: return "PlacePointing";
    case TaskPhase::Placing: return "Placing";
    case TaskPhase::Done: return "Done";
    case TaskPhase::Failed: return "Failed";
  }
  return "?";
}

TaskPhase phase_from_string(std::string_view name) {
  for (TaskPhase p : {TaskPhase::Idle, TaskPhase::ObjectMenu, TaskPhase::ActionMenu, TaskPhase::Picking,
                      TaskPhase::PlacePointing, TaskPhase::Placing, TaskPhase::Done, TaskPhase::Failed}) {
    if (to_string(p) == name) return p;
  }
  throw Error(ErrorCode::ParseError, "unknown phase '" + std::string(name) + "'");
}

MenuState build_menu(const std::vector<Detection2D>& detections) {
  MenuState menu;
  for (const auto& d : detections) menu.items.push_back({d.instance, d.label, d.bbox, {Affordance::Pick}});
  std::stable_sort(menu.items.begin(), menu.items.end(), [](const MenuItem& a, const MenuItem& b) {
    if (a.bbox.u_min != b.bbox.u_min) return a.bbox.u_min < b.bbox.u_min;
    return a.object_id < b.object_id;
  });
  return menu;
}

Vec3 project_marker(const Vec2& pixel, const PinholeCamera& camera, const RigidTransform& camera_from_table) {
  if (camera_from_table.parent() != FrameId::Camera || camera_from_table.child() != FrameId::Table) {
    throw Error(ErrorCode::FrameMismatch, "project_marker expects a camera<-table pose");
  }
  const RigidTransform table_from_camera = camera_from_table.inverse();
  const Vec3 origin = table_from_camera.translation();
  const Vec3 dir = table_from_camera.rotate(camera.ray(pixel));
  if (std::abs(dir.z()) < 1e-12 * dir.norm()) {
    throw Error(ErrorCode::ParallelRay, "marker ray is parallel to the table");
  }
  const double t = -origin.z() / dir.z();
  if (!(t > 0)) throw Error(ErrorCode::ParallelRay, "marker ray points away from the table");
  Vec3 p = origin + t * dir;
  p.z() = 0.0;
  return p;
}

namespace {

StepResult flagged(SessionState s, std::string why) {
  s.warning = true;
  s.warning_reason = std::move(why);
  return {std::move(s), std::nullopt};
}

int wrap(int i, int n) { return n == 0 ? 0 : ((i % n) + n) % n; }

}  // namespace

SessionState on_menu(const SessionState& state, MenuState menu) {
  SessionState s = state;
  s.menu = std::move(menu);
  s.menu.highlighted = 0;
  if (s.phase == TaskPhase::Idle && !s.menu.items.empty()) s.phase = TaskPhase::ObjectMenu;
  return s;
}

StepResult step(const SessionState& state, const UserCommand& cmd, const MarkerView& view) {
  SessionState s = state;
  s.warning = false;
  s.warning_reason.clear();
  const TaskPhase phase = s.phase;

  if (cmd.kind == CommandKind::MarkerMove) {
    if (phase != TaskPhase::PlacePointing) return flagged(state, "marker moves only while pointing");
    Vec2 px = s.marker.pixel + Vec2(cmd.du, cmd.dv);
    px.x() = std::clamp(px.x(), 0.0, static_cast<double>(view.camera.width() - 1));
    px.y() = std::clamp(px.y(), 0.0, static_cast<double>(view.camera.height() - 1));
    try {
      s.marker.table_point = project_marker(px, view.camera, view.camera_from_table);
    } catch (const Error& e) {
      return flagged(state, e.what());
    }
    s.marker.pixel = px;
    return {s, std::nullopt};
  }

  const bool menu_phase =
      phase == TaskPhase::ObjectMenu || phase == TaskPhase::ActionMenu || phase == TaskPhase::PlacePointing;
  if (!menu_phase) return flagged(state, std::string("no commands accepted in ") + std::string(to_string(phase)));
  s.total_commands += 1;

  switch (cmd.kind) {
    case CommandKind::Left:
    case CommandKind::Right: {
      const int delta = cmd.kind == CommandKind::Right ? 1 : -1;
      if (phase == TaskPhase::ObjectMenu) {
        s.menu.highlighted = wrap(s.menu.highlighted + delta, static_cast<int>(s.menu.items.size()));
      } else if (phase == TaskPhase::ActionMenu) {
        const auto& item = s.menu.items[static_cast<std::size_t>(s.menu.highlighted)];
        s.action_highlight = wrap(s.action_highlight + delta, static_cast<int>(item.actions.size()));
      } else {
        return flagged(state, "LEFT/RIGHT not used while pointing");
      }
      return {s, std::nullopt};
    }
    case CommandKind::Back:
      if (phase == TaskPhase::ActionMenu) {
        s.phase = TaskPhase::ObjectMenu;
        s.selected_object.reset();
        return {s, std::nullopt};
      }
      return flagged(state, "BACK has no effect here");
    case CommandKind::Select:
      if (phase == TaskPhase::ObjectMenu) {
        if (s.menu.items.empty()) return flagged(state, "menu is empty");
        s.selected_object = s.menu.items[static_cast<std::size_t>(s.menu.highlighted)].object_id;
        s.action_highlight = 0;
        s.phase = TaskPhase::ActionMenu;
        return {s, std::nullopt};
      }
      if (phase == TaskPhase::ActionMenu) {
        s.counted_commands += 1;
        s.phase = TaskPhase::Picking;
        return {s, RobotAction{RobotAction::Kind::Pick, *s.selected_object, Vec3::Zero()}};
      }
      // PlacePointing
      if (!s.held_object) return flagged(state, "nothing held");
      s.counted_commands += 1;
      s.phase = TaskPhase::Placing;
      return {s, RobotAction{RobotAction::Kind::Place, *s.held_object, s.marker.table_point}};
    case CommandKind::MarkerMove:
      break;
  }
  return {s, std::nullopt};
}

SessionState on_pick_result(const SessionState& state, bool success, const MarkerView& view) {
  if (state.phase != TaskPhase::Picking) throw Error(ErrorCode::InvalidState, "pick result outside Picking");
  SessionState s = state;
  if (success) {
    s.held_object = s.selected_object;
    s.phase = TaskPhase::PlacePointing;
    s.marker.pixel = view.camera.center();
    s.marker.table_point = project_marker(s.marker.pixel, view.camera, view.camera_from_table);
  } else {
    s.selected_object.reset();
    s.phase = TaskPhase::ObjectMenu;
  }
  return s;
}

SessionState on_place_result(const SessionState& state, bool success) {
  if (state.phase != TaskPhase::Placing) throw Error(ErrorCode::InvalidState, "place result outside Placing");
  SessionState s = state;
  s.phase = success ? TaskPhase::Done : TaskPhase::Failed;
  if (success) s.held_object.reset();
  return s;
}

}  // namespace assist
