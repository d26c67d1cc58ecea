#pragma once

#include <cstdint>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "assist/arm.hpp"
#include "assist/intent.hpp"
#include "assist/perception.hpp"
#include "assist/planner.hpp"
#include "assist/scene.hpp"

namespace assist {

enum class Mode { SemiAuto, Cartesian };
std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view name);

// Everything a trial or a served session needs, loaded from the experiment
// config (see config/experiment.cfg) plus the arm and noise configs.
struct ExperimentConfig {
  std::uint64_t seed = 2024;
  int trials_per_class = 5;
  int distractors = 2;            // extra objects on the table per trial
  double displacement = 0.30;     // m, target distance from the pickup location
  double target_gap = 0.02;       // m, target footprint clearance from other objects
  double command_latency = 1.5;   // s per discrete command
  double marker_latency = 1.5;    // s per marker move
  double place_margin = 0.01;     // m, judge_place expansion
  int max_pick_attempts = 1;      // semiauto operator retries
  double fiducial_side = 0.08;    // m
  double fiducial_noise_px = 0.0; // sigma of corner detection noise
  Vec3 camera_eye{0.0, 0.15, 0.95};     // Table frame
  Vec3 camera_target{0.0, -0.05, 0.0};  // Table frame
  PinholeCamera camera{500, 500, 319.5, 239.5, 640, 480};
  SceneConfig scene;
  NoiseConfig noise;
  LocalizationParams localization;
  PlannerParams planner;
  RobotConfig robot = RobotConfig::defaults();

  // Keys: experiment.*, camera.*, scene.*, noise.*, perception.*, planner.*.
  // Arm keys are read only if `schema = arm/1` is present.
  static ExperimentConfig from_config(const KeyValueConfig& config);
  // Experiment file plus optional separate arm and noise files.
  static ExperimentConfig load(const std::string& experiment_path, const std::string& arm_path = {},
                               const std::string& noise_path = {});
};

// A seeded pick-and-place task: which object to move and where.
struct TrialSpec {
  ObjectClass target_class = ObjectClass::Ball;
  int trial = 0;
  std::uint64_t seed = 0;  // per-trial seed (mode independent)
  Scene scene;
  int object_id = 0;
  Vec2 pickup = Vec2::Zero();
  Vec2 target = Vec2::Zero();
};

TrialSpec make_trial(const ExperimentConfig& config, ObjectClass target_class, int trial);

struct TrialRecord {
  ObjectClass object_class = ObjectClass::Ball;
  Mode mode = Mode::SemiAuto;
  int trial = 0;
  bool picked = false;
  double pickup_time = 0;  // simulated s
  bool placed = false;
  double place_time = 0;   // simulated s
  int n_commands = 0;
  std::uint64_t seed = 0;
  double place_error = -1;  // m, final center to target; -1 if never released
  std::string reason;
};

nlohmann::json record_to_json(const TrialRecord& r);
TrialRecord record_from_json(const nlohmann::json& j);

// Point target with the object's own footprint centered on it, grown by
// `margin` on every side. Round footprints grow radially.
bool judge_place(const Vec3& final_center, const Vec3& target, const Footprint& footprint, double margin = 0.01);

// Operator input as recorded in command logs.
struct OperatorInput {
  std::optional<UserCommand> command;
  std::optional<JogCommand> jog;
  bool give_up = false;  // operator abandons the trial

  nlohmann::json to_json() const;
  static OperatorInput from_json(const nlohmann::json& j);
};

// Single-owner session: intent FSM (semiauto) or jog loop (cartesian) driving
// the simulated robot with a simulated clock. Every observable change is an
// event; the ordered event list is the session transcript.
class Session {
 public:
  Session(const ExperimentConfig& config, TrialSpec spec, Mode mode);

  // Applies one operator input and returns the events it produced.
  std::vector<nlohmann::json> handle(const OperatorInput& input, std::stop_token stop = {});

  bool finished() const { return result_.has_value(); }
  const std::optional<TrialRecord>& result() const { return result_; }
  const std::vector<nlohmann::json>& events() const { return events_; }
  // JSONL text of all events so far.
  std::string transcript() const;
  const std::vector<OperatorInput>& inputs() const { return inputs_; }

  const SessionState& state() const { return state_; }
  const World& world() const { return world_; }
  const TrialSpec& spec() const { return spec_; }
  const ExperimentConfig& config() const { return config_; }
  Mode mode() const { return mode_; }
  double clock() const { return clock_; }
  const MarkerView& true_view() const { return true_view_; }
  const MarkerView& estimated_view() const { return est_view_; }
  const std::vector<Detection2D>& detections() const { return detections_; }

  // Full state document (scene, robot, menu, phase, marker, clock).
  nlohmann::json snapshot() const;
  nlohmann::json menu_json() const;

 private:
  void emit(std::vector<nlohmann::json>& out, nlohmann::json ev);
  void set_phase(std::vector<nlohmann::json>& out, TaskPhase to);
  // One status event per waypoint, stamped with the simulated clock.
  void emit_motion(std::vector<nlohmann::json>& out, const MotionOutcome& motion);
  void run_pick(std::vector<nlohmann::json>& out, int object_id, std::stop_token stop);
  void run_place(std::vector<nlohmann::json>& out, const Vec3& target, std::stop_token stop);
  void handle_command(std::vector<nlohmann::json>& out, const UserCommand& cmd, std::stop_token stop);
  void handle_jog(std::vector<nlohmann::json>& out, JogCommand cmd);
  void finish(std::vector<nlohmann::json>& out, const std::string& reason);

  ExperimentConfig config_;
  TrialSpec spec_;
  Mode mode_;
  World world_;
  SessionState state_;
  MarkerView true_view_;
  MarkerView est_view_;
  std::vector<Detection2D> detections_;
  double clock_ = 0;
  double pick_done_clock_ = -1;
  int pick_attempts_ = 0;
  int jog_count_ = 0;
  std::optional<Vec2> release_center_;
  std::optional<TrialRecord> result_;
  std::vector<nlohmann::json> events_;
  std::vector<OperatorInput> inputs_;
};

// Replays a command log against a fresh session.
Session replay(const ExperimentConfig& config, const TrialSpec& spec, Mode mode,
               const std::vector<OperatorInput>& log);

std::vector<OperatorInput> parse_command_log(const std::string& text);
std::string format_command_log(const std::vector<OperatorInput>& log);

}  // namespace assist
