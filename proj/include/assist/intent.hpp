#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "assist/geometry.hpp"
#include "assist/perception.hpp"

namespace assist {

enum class CommandKind { Left, Right, Select, Back, MarkerMove };

struct UserCommand {
  CommandKind kind = CommandKind::Select;
  double du = 0;  // pixels, MarkerMove only
  double dv = 0;

  static UserCommand left() { return {CommandKind::Left}; }
  static UserCommand right() { return {CommandKind::Right}; }
  static UserCommand select() { return {CommandKind::Select}; }
  static UserCommand back() { return {CommandKind::Back}; }
  static UserCommand marker_move(double du, double dv) { return {CommandKind::MarkerMove, du, dv}; }
};

std::string_view to_string(CommandKind kind);
CommandKind command_from_string(std::string_view name);

enum class Affordance { Pick };
std::string_view to_string(Affordance a);

struct MenuItem {
  int object_id = 0;
  ObjectClass label = ObjectClass::Ball;
  PixelBox bbox;
  std::vector<Affordance> actions;
};

struct MenuState {
  std::vector<MenuItem> items;
  int highlighted = 0;
};

enum class TaskPhase { Idle, ObjectMenu, ActionMenu, Picking, PlacePointing, Placing, Done, Failed };
std::string_view to_string(TaskPhase phase);
TaskPhase phase_from_string(std::string_view name);

struct Marker {
  Vec2 pixel = Vec2::Zero();
  Vec3 table_point = Vec3::Zero();
};

// Camera model used to re-project the marker.
struct MarkerView {
  PinholeCamera camera;
  RigidTransform camera_from_table;  // Camera <- Table
};

struct SessionState {
  TaskPhase phase = TaskPhase::Idle;
  MenuState menu;
  int action_highlight = 0;
  std::optional<int> selected_object;
  std::optional<int> held_object;
  Marker marker;
  int counted_commands = 0;  // decision SELECTs: Pick and Place
  int total_commands = 0;    // every accepted LEFT/RIGHT/SELECT/BACK
  bool warning = false;      // last input was illegal in its phase
  std::string warning_reason;
};

struct RobotAction {
  enum class Kind { Pick, Place };
  Kind kind = Kind::Pick;
  int object_id = 0;
  Vec3 target = Vec3::Zero();  // Table frame, Place only
};

struct StepResult {
  SessionState state;
  std::optional<RobotAction> action;
};

// One item per detection with the Pick affordance, left to right by bbox.
MenuState build_menu(const std::vector<Detection2D>& detections);

// Intersection of the camera ray through `pixel` with the table plane z = 0.
// Throws ParallelRay when the ray does not meet the plane in front of the camera.
Vec3 project_marker(const Vec2& pixel, const PinholeCamera& camera, const RigidTransform& camera_from_table);

// Enters ObjectMenu from Idle when the menu is non-empty.
SessionState on_menu(const SessionState& state, MenuState menu);

// Consumes one operator command. Illegal commands return the state unchanged
// apart from the warning flag.
StepResult step(const SessionState& state, const UserCommand& cmd, const MarkerView& view);

// Robot completion events.
SessionState on_pick_result(const SessionState& state, bool success, const MarkerView& view);
SessionState on_place_result(const SessionState& state, bool success);

}  // namespace assist
