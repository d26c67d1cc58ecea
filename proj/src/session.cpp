#include "assist/session.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "assist/error.hpp"
#include "assist/random.hpp"

namespace assist {

using nlohmann::json;

std::string_view to_string(Mode mode) { return mode == Mode::SemiAuto ? "semiauto" : "cartesian"; }

Mode mode_from_string(std::string_view name) {
  if (name == "semiauto") return Mode::SemiAuto;
  if (name == "cartesian") return Mode::Cartesian;
  throw Error(ErrorCode::ParseError, "unknown mode '" + std::string(name) + "'");
}

namespace {

Vec3 vec3_or(const KeyValueConfig& c, const std::string& key, const Vec3& fallback) {
  if (!c.has(key)) return fallback;
  const auto v = c.get_vector(key, 3);
  return {v[0], v[1], v[2]};
}

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }
json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json q_json(const JointConfig& q) {
  json a = json::array();
  for (int i = 0; i < kDof; ++i) a.push_back(q[i]);
  return a;
}

bool footprint_within(const Footprint& fp, const Rect2& r) {
  if (fp.round) {
    const double rad = fp.half.x();
    return fp.center.x() - rad >= r.x_min && fp.center.x() + rad <= r.x_max && fp.center.y() - rad >= r.y_min &&
           fp.center.y() + rad <= r.y_max;
  }
  for (const Vec2& c : fp.corners()) {
    if (!r.contains(c)) return false;
  }
  return true;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& c) {
  ExperimentConfig e;
  e.seed = static_cast<std::uint64_t>(c.get_int("experiment.seed", static_cast<long long>(e.seed)));
  e.trials_per_class = static_cast<int>(c.get_int("experiment.trials_per_class", e.trials_per_class));
  e.distractors = static_cast<int>(c.get_int("experiment.distractors", e.distractors));
  e.displacement = c.get_double("experiment.displacement", e.displacement);
  e.target_gap = c.get_double("experiment.target_gap", e.target_gap);
  e.command_latency = c.get_double("experiment.command_latency", e.command_latency);
  e.marker_latency = c.get_double("experiment.marker_latency", e.marker_latency);
  e.place_margin = c.get_double("experiment.place_margin", e.place_margin);
  e.max_pick_attempts = static_cast<int>(c.get_int("experiment.max_pick_attempts", e.max_pick_attempts));
  e.fiducial_side = c.get_double("fiducial.side", e.fiducial_side);
  e.fiducial_noise_px = c.get_double("noise.fiducial_px", e.fiducial_noise_px);
  e.camera_eye = vec3_or(c, "camera.eye", e.camera_eye);
  e.camera_target = vec3_or(c, "camera.target", e.camera_target);
  if (c.has("camera.fx")) e.camera = PinholeCamera::from_config(c);
  e.scene = SceneConfig::from_config(c);
  e.noise = NoiseConfig::from_config(c);
  e.localization = LocalizationParams::from_config(c);
  e.planner = PlannerParams::from_config(c);
  if (c.has("schema")) e.robot = RobotConfig::from_config(c);
  if (e.trials_per_class < 1 || e.distractors < 0 || e.distractors > 9 || !(e.displacement > 0) ||
      e.command_latency < 0 || e.marker_latency < 0 || e.place_margin < 0 || e.max_pick_attempts < 1 ||
      !(e.fiducial_side > 0) || e.fiducial_noise_px < 0) {
    throw Error(ErrorCode::ConfigError, c.origin() + ": invalid experiment parameters");
  }
  return e;
}

ExperimentConfig ExperimentConfig::load(const std::string& experiment_path, const std::string& arm_path,
                                        const std::string& noise_path) {
  KeyValueConfig merged = experiment_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(experiment_path);
  for (const std::string& extra : {arm_path, noise_path}) {
    if (extra.empty()) continue;
    const KeyValueConfig more = KeyValueConfig::load(extra);
    for (const auto& [k, v] : more.values()) {
      if (merged.has(k)) throw Error(ErrorCode::ConfigError, extra + ": key '" + k + "' already set");
      merged.set(k, v);
    }
  }
  return from_config(merged);
}

TrialSpec make_trial(const ExperimentConfig& config, ObjectClass target_class, int trial) {
  const auto class_index =
      static_cast<std::uint64_t>(std::find(kAllClasses.begin(), kAllClasses.end(), target_class) - kAllClasses.begin());
  TrialSpec spec;
  spec.target_class = target_class;
  spec.trial = trial;
  spec.seed = derive_seed(config.seed, class_index, static_cast<std::uint64_t>(trial));
  Rng rng(spec.seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<ObjectClass> pool;
    for (ObjectClass c : kAllClasses) {
      if (c != target_class) pool.push_back(c);
    }
    std::vector<ObjectClass> classes{target_class};
    for (int k = 0; k < config.distractors; ++k) {
      const auto i = rng.index(pool.size());
      classes.push_back(pool[i]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    }
    Scene scene;
    try {
      scene = spawn_scene(derive_seed(spec.seed, 100 + static_cast<std::uint64_t>(attempt)), classes, config.scene);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PlacementFailure) throw;
      continue;
    }
    const SceneObject& obj = scene.objects.front();
    const Footprint fp = obj.footprint();
    for (int k = 0; k < 64; ++k) {
      const double phi = rng.uniform(-M_PI, M_PI);
      Footprint moved = fp;
      moved.center = fp.center + config.displacement * Vec2(std::cos(phi), std::sin(phi));
      if (!footprint_within(moved, scene.reachable_region)) continue;
      const bool clash = std::any_of(scene.objects.begin() + 1, scene.objects.end(), [&](const SceneObject& o) {
        return footprints_overlap(moved, o.footprint(), config.target_gap);
      });
      if (clash) continue;
      spec.scene = std::move(scene);
      spec.object_id = obj.id;
      spec.pickup = fp.center;
      spec.target = moved.center;
      return spec;
    }
  }
  throw Error(ErrorCode::PlacementFailure, "no trial layout admits a clear target at the requested displacement");
}

json record_to_json(const TrialRecord& r) {
  return {{"object_class", std::string(to_string(r.object_class))},
          {"mode", std::string(to_string(r.mode))},
          {"trial", r.trial},
          {"picked", r.picked},
          {"pickup_time", r.pickup_time},
          {"placed", r.placed},
          {"place_time", r.place_time},
          {"n_commands", r.n_commands},
          {"seed", r.seed},
          {"place_error", r.place_error},
          {"reason", r.reason}};
}

TrialRecord record_from_json(const json& j) {
  try {
    TrialRecord r;
    r.object_class = class_from_string(j.at("object_class").get<std::string>());
    r.mode = mode_from_string(j.at("mode").get<std::string>());
    r.trial = j.at("trial").get<int>();
    r.picked = j.at("picked").get<bool>();
    r.pickup_time = j.at("pickup_time").get<double>();
    r.placed = j.at("placed").get<bool>();
    r.place_time = j.at("place_time").get<double>();
    r.n_commands = j.at("n_commands").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.place_error = j.value("place_error", -1.0);
    r.reason = j.value("reason", std::string{});
    if (r.placed && !r.picked) throw Error(ErrorCode::ParseError, "bad trial record: placed without pickup");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad trial record: ") + e.what());
  }
}

bool judge_place(const Vec3& final_center, const Vec3& target, const Footprint& footprint, double margin) {
  // Tolerance absorbs the rounding of offsets that sit exactly on the boundary.
  constexpr double kEps = 1e-9;
  const Vec2 d = (final_center - target).head<2>();
  if (footprint.round) return d.norm() <= margin + kEps;
  const double c = std::cos(footprint.yaw), s = std::sin(footprint.yaw);
  const double lx = c * d.x() + s * d.y();
  const double ly = -s * d.x() + c * d.y();
  return std::abs(lx) <= margin + kEps && std::abs(ly) <= margin + kEps;
}

json OperatorInput::to_json() const {
  if (give_up) return {{"give_up", true}};
  if (jog) return {{"jog", std::string(to_string(*jog))}};
  if (command) {
    json j{{"cmd", std::string(to_string(command->kind))}};
    if (command->kind == CommandKind::MarkerMove) {
      j["du"] = command->du;
      j["dv"] = command->dv;
    }
    return j;
  }
  throw Error(ErrorCode::InvalidArgument, "empty operator input");
}

OperatorInput OperatorInput::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "operator input must be an object");
  OperatorInput in;
  try {
    if (j.contains("give_up")) {
      in.give_up = j.at("give_up").get<bool>();
    } else if (j.contains("jog")) {
      in.jog = jog_from_string(j.at("jog").get<std::string>());
    } else if (j.contains("cmd")) {
      UserCommand c;
      c.kind = command_from_string(j.at("cmd").get<std::string>());
      if (c.kind == CommandKind::MarkerMove) {
        c.du = j.at("du").get<double>();
        c.dv = j.at("dv").get<double>();
        if (!std::isfinite(c.du) || !std::isfinite(c.dv)) throw Error(ErrorCode::ParseError, "marker move not finite");
      }
      in.command = c;
    } else {
      throw Error(ErrorCode::ParseError, "operator input needs cmd, jog or give_up");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad operator input: ") + e.what());
  }
  return in;
}

std::vector<OperatorInput> parse_command_log(const std::string& text) {
  std::vector<OperatorInput> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(OperatorInput::from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, "command log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string format_command_log(const std::vector<OperatorInput>& log) {
  std::string out;
  for (const auto& in : log) out += in.to_json().dump() + "\n";
  return out;
}

// ---------------------------------------------------------------------------

Session::Session(const ExperimentConfig& config, TrialSpec spec, Mode mode)
    : config_(config),
      spec_(std::move(spec)),
      mode_(mode),
      true_view_{config.camera, look_at(config.camera_eye, config.camera_target)},
      est_view_{config.camera, look_at(config.camera_eye, config.camera_target)} {
  world_.scene = spec_.scene;
  world_.q = config_.robot.ready;
  world_.gripper_open = false;

  // Fiducial calibration from (optionally noisy) corner detections.
  Rng fid_rng(derive_seed(spec_.seed, 7));
  std::array<Vec2, 4> corners;
  const auto marker = fiducial_corners(config_.fiducial_side);
  for (std::size_t i = 0; i < 4; ++i) {
    corners[i] = config_.camera.project(true_view_.camera_from_table.apply(marker[i]));
    if (config_.fiducial_noise_px > 0) {
      corners[i] += config_.fiducial_noise_px * Vec2(fid_rng.normal(), fid_rng.normal());
    }
  }
  est_view_.camera_from_table = estimate_fiducial_pose(corners, config_.fiducial_side, config_.camera);

  std::vector<json> out;
  emit(out, {{"event", "start"},
             {"mode", std::string(to_string(mode_))},
             {"seed", spec_.seed},
             {"object", spec_.object_id},
             {"class", std::string(to_string(spec_.target_class))},
             {"pickup", vec_json(spec_.pickup)},
             {"target", vec_json(spec_.target)}});
  if (mode_ == Mode::SemiAuto) {
    const DepthImage image = render(world_.scene, true_view_.camera_from_table, config_.camera);
    NoiseConfig noise = config_.noise;
    noise.seed = derive_seed(spec_.seed, 3, config_.noise.seed);
    detections_ = detect(image, class_lookup(world_.scene), noise);
    state_ = on_menu(state_, build_menu(detections_));
    emit(out, {{"event", "menu"}, {"menu", menu_json()}});
    if (state_.phase != TaskPhase::Idle) emit(out, {{"event", "phase"}, {"from", "Idle"}, {"to", to_string(state_.phase)}});
  } else {
    set_phase(out, TaskPhase::Picking);
  }
}

void Session::emit(std::vector<json>& out, json ev) {
  ev["clock"] = clock_;
  ev["index"] = events_.size();
  events_.push_back(ev);
  out.push_back(std::move(ev));
}

void Session::set_phase(std::vector<json>& out, TaskPhase to) {
  const TaskPhase from = state_.phase;
  state_.phase = to;
  if (from != to) emit(out, {{"event", "phase"}, {"from", to_string(from)}, {"to", to_string(to)}});
}

std::string Session::transcript() const {
  std::string out;
  for (const auto& ev : events_) out += ev.dump() + "\n";
  return out;
}

json Session::menu_json() const {
  json items = json::array();
  for (const auto& it : state_.menu.items) {
    json actions = json::array();
    for (Affordance a : it.actions) actions.push_back(std::string(to_string(a)));
    items.push_back({{"id", it.object_id},
                     {"label", std::string(to_string(it.label))},
                     {"bbox", json::array({it.bbox.u_min, it.bbox.v_min, it.bbox.u_max, it.bbox.v_max})},
                     {"actions", actions}});
  }
  return {{"items", items}, {"highlighted", state_.menu.highlighted}, {"action_highlight", state_.action_highlight}};
}

json Session::snapshot() const {
  const RigidTransform tcp = table_from_gripper(config_.robot.chain, world_.q);
  const auto& cam = config_.camera;
  json held = world_.held ? json(world_.held->id) : json(nullptr);
  return {{"mode", std::string(to_string(mode_))},
          {"clock", clock_},
          {"phase", std::string(to_string(state_.phase))},
          {"menu", menu_json()},
          {"marker", {{"pixel", vec_json(state_.marker.pixel)}, {"table_point", vec_json(state_.marker.table_point)}}},
          {"scene", scene_to_json(world_.scene)},
          {"robot",
           {{"q", q_json(world_.q)}, {"gripper_open", world_.gripper_open}, {"held", held},
            {"tcp", vec_json(Vec3(tcp.translation()))}}},
          {"camera",
           {{"fx", cam.fx()}, {"fy", cam.fy()}, {"cx", cam.cx()}, {"cy", cam.cy()}, {"width", cam.width()},
            {"height", cam.height()}}},
          {"task",
           {{"object", spec_.object_id},
            {"class", std::string(to_string(spec_.target_class))},
            {"target", vec_json(spec_.target)}}},
          {"counted_commands", mode_ == Mode::SemiAuto ? state_.counted_commands : jog_count_},
          {"finished", finished()}};
}

void Session::emit_motion(std::vector<json>& out, const MotionOutcome& motion) {
  const double start = clock_;
  for (std::size_t k = 0; k < motion.trajectories.size(); ++k) {
    const auto& traj = motion.trajectories[k];
    double t = start + motion.trajectory_start[k];
    for (std::size_t i = 0; i < traj.waypoints.size(); ++i) {
      if (i > 0) t += segment_duration(config_.robot.chain, traj.waypoints[i - 1], traj.waypoints[i]);
      clock_ = t;
      const Vec3 tcp = table_from_gripper(config_.robot.chain, traj.waypoints[i]).translation();
      emit(out, {{"event", "status"},
                 {"segment", k},
                 {"waypoint", i},
                 {"waypoints", traj.waypoints.size()},
                 {"tcp", vec_json(tcp)}});
    }
  }
  clock_ = start + motion.duration;
}

std::vector<json> Session::handle(const OperatorInput& input, std::stop_token stop) {
  std::vector<json> out;
  inputs_.push_back(input);
  if (finished()) {
    emit(out, {{"event", "ignored"}, {"input", input.to_json()}, {"reason", "trial finished"}});
    return out;
  }
  if (input.give_up) {
    emit(out, {{"event", "give_up"}});
    finish(out, "operator gave up");
    return out;
  }
  if (input.command) {
    if (mode_ != Mode::SemiAuto) {
      emit(out, {{"event", "ignored"}, {"input", input.to_json()}, {"reason", "menu commands need semiauto mode"}});
      return out;
    }
    handle_command(out, *input.command, stop);
  } else if (input.jog) {
    if (mode_ != Mode::Cartesian) {
      emit(out, {{"event", "ignored"}, {"input", input.to_json()}, {"reason", "jog commands need cartesian mode"}});
      return out;
    }
    handle_jog(out, *input.jog);
  }
  return out;
}

void Session::handle_command(std::vector<json>& out, const UserCommand& cmd, std::stop_token stop) {
  const bool marker = cmd.kind == CommandKind::MarkerMove;
  clock_ += marker ? config_.marker_latency : config_.command_latency;
  const SessionState before = state_;
  StepResult r = step(state_, cmd, est_view_);
  state_ = r.state;
  json ev{{"event", "command"},
          {"cmd", std::string(to_string(cmd.kind))},
          {"counted", state_.counted_commands > before.counted_commands},
          {"warning", state_.warning}};
  if (marker) {
    ev["du"] = cmd.du;
    ev["dv"] = cmd.dv;
  }
  if (state_.warning) ev["reason"] = state_.warning_reason;
  emit(out, ev);
  if (marker && !state_.warning) {
    emit(out, {{"event", "marker"},
               {"pixel", vec_json(state_.marker.pixel)},
               {"table_point", vec_json(state_.marker.table_point)}});
  }
  // The console redraws the menu on every phase change as well.
  if (state_.menu.highlighted != before.menu.highlighted || state_.action_highlight != before.action_highlight ||
      state_.phase != before.phase) {
    emit(out, {{"event", "menu"}, {"menu", menu_json()}});
  }
  if (state_.phase != before.phase) {
    emit(out, {{"event", "phase"}, {"from", to_string(before.phase)}, {"to", to_string(state_.phase)}});
  }
  if (!r.action) return;
  if (r.action->kind == RobotAction::Kind::Pick) {
    emit(out, {{"event", "action"}, {"kind", "pick"}, {"object", r.action->object_id}});
    run_pick(out, r.action->object_id, stop);
  } else {
    emit(out, {{"event", "action"},
               {"kind", "place"},
               {"object", r.action->object_id},
               {"target", vec_json(r.action->target)}});
    run_place(out, r.action->target, stop);
  }
}

void Session::run_pick(std::vector<json>& out, int object_id, std::stop_token stop) {
  ++pick_attempts_;
  const MenuItem* item = nullptr;
  for (const auto& it : state_.menu.items) {
    if (it.object_id == object_id) item = &it;
  }
  PickOutcome outcome;
  outcome.world = world_;
  std::optional<Box3D> box;
  try {
    if (!item) throw Error(ErrorCode::UnknownObject, "selected item is not in the menu");
    const DepthImage image = render(world_.scene, true_view_.camera_from_table, config_.camera);
    box = localize(image, config_.camera, est_view_.camera_from_table, item->bbox, config_.localization);
    const auto grasps = propose_grasps(*box, config_.robot.gripper);
    const GraspCandidate& best = grasps.front();
    emit(out, {{"event", "perception"},
               {"center", vec_json(box->center)},
               {"half_extents", vec_json(box->half_extents)},
               {"yaw", box->yaw},
               {"grasp", {best.rect.x, best.rect.y, best.rect.w, best.rect.h, best.rect.theta}},
               {"confidence", best.confidence}});
    const GraspPose6D grasp = lift_to_pose(best, *box, config_.robot.chain.base_from_table());
    PlannerParams params = config_.planner;
    params.seed = derive_seed(spec_.seed, 10 + static_cast<std::uint64_t>(pick_attempts_), config_.planner.seed);
    outcome = execute_pick(config_.robot, world_, grasp, params, stop);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Cancelled) throw;
    outcome.success = false;
    outcome.error = e.code();
    outcome.reason = e.what();
  }
  emit_motion(out, outcome);
  world_ = outcome.world;
  if (outcome.success && world_.held && box && outcome.table_from_grasp) {
    // Belief: object frame at the fitted box's footprint center on the table.
    const RigidTransform believed_object =
        RigidTransform::from_yaw(FrameId::Table, FrameId::Object, box->yaw, Vec3(box->center.x(), box->center.y(), 0));
    world_.held->believed = compose(outcome.table_from_grasp->inverse(), believed_object);
  }
  json ev{{"event", "outcome"}, {"kind", "pick"}, {"success", outcome.success}, {"reason", outcome.reason}};
  if (outcome.object_id) ev["held"] = *outcome.object_id;
  emit(out, ev);
  const bool picked = outcome.success && outcome.object_id && *outcome.object_id == object_id;
  if (picked) pick_done_clock_ = clock_;
  const TaskPhase from = state_.phase;
  state_ = on_pick_result(state_, picked, est_view_);
  emit(out, {{"event", "phase"}, {"from", to_string(from)}, {"to", to_string(state_.phase)}});
  if (picked) {
    emit(out, {{"event", "marker"},
               {"pixel", vec_json(state_.marker.pixel)},
               {"table_point", vec_json(state_.marker.table_point)}});
  }
}

void Session::run_place(std::vector<json>& out, const Vec3& target, std::stop_token stop) {
  PlaceOutcome outcome;
  outcome.world = world_;
  try {
    PlannerParams params = config_.planner;
    params.seed = derive_seed(spec_.seed, 20, config_.planner.seed);
    outcome = execute_place(config_.robot, world_, target, params, stop);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Cancelled) throw;
    outcome.success = false;
    outcome.error = e.code();
    outcome.reason = e.what();
  }
  emit_motion(out, outcome);
  world_ = outcome.world;
  json ev{{"event", "outcome"}, {"kind", "place"}, {"success", outcome.success}, {"reason", outcome.reason}};
  if (outcome.success) {
    ev["final_center"] = vec_json(outcome.final_center);
    release_center_ = outcome.final_center;
  }
  emit(out, ev);
  const TaskPhase from = state_.phase;
  state_ = on_place_result(state_, outcome.success);
  emit(out, {{"event", "phase"}, {"from", to_string(from)}, {"to", to_string(state_.phase)}});
  finish(out, outcome.success ? std::string{} : outcome.reason);
}

void Session::handle_jog(std::vector<json>& out, JogCommand cmd) {
  clock_ += config_.command_latency;
  ++jog_count_;
  const WorldJog wj = jog_world(config_.robot, world_, cmd, config_.planner);
  world_ = wj.world;
  clock_ += wj.result.duration;
  json ev{{"event", "jog"}, {"cmd", std::string(to_string(cmd))}, {"rejected", wj.result.rejected}};
  if (wj.result.rejected) ev["reason"] = wj.result.reason;
  ev["tcp"] = vec_json(Vec3(table_from_gripper(config_.robot.chain, world_.q).translation()));
  emit(out, ev);
  if (wj.grasped) {
    emit(out, {{"event", "outcome"}, {"kind", "pick"}, {"success", true}, {"held", *wj.grasped}});
    if (*wj.grasped == spec_.object_id && pick_done_clock_ < 0) pick_done_clock_ = clock_;
    set_phase(out, TaskPhase::Placing);
  }
  if (wj.released) {
    const Vec2 center = world_.scene.at(*wj.released).footprint().center;
    emit(out, {{"event", "outcome"}, {"kind", "place"}, {"success", true}, {"final_center", vec_json(center)}});
    if (*wj.released == spec_.object_id) {
      release_center_ = center;
      set_phase(out, TaskPhase::Done);
      finish(out, {});
    } else {
      set_phase(out, TaskPhase::Picking);
    }
  }
}

void Session::finish(std::vector<json>& out, const std::string& reason) {
  TrialRecord r;
  r.object_class = spec_.target_class;
  r.mode = mode_;
  r.trial = spec_.trial;
  r.seed = spec_.seed;
  r.picked = pick_done_clock_ >= 0;
  r.pickup_time = r.picked ? pick_done_clock_ : clock_;
  r.n_commands = mode_ == Mode::SemiAuto ? state_.counted_commands : jog_count_;
  if (release_center_) {
    const SceneObject& obj = world_.scene.at(spec_.object_id);
    const Vec3 final_center(release_center_->x(), release_center_->y(), 0);
    const Vec3 target(spec_.target.x(), spec_.target.y(), 0);
    r.place_error = (final_center - target).head<2>().norm();
    r.placed = r.picked && judge_place(final_center, target, obj.footprint(), config_.place_margin);
    r.place_time = r.picked ? clock_ - pick_done_clock_ : 0.0;
  }
  r.reason = reason;
  if (r.picked && !r.placed && r.reason.empty()) r.reason = "placed outside the target boundary";
  result_ = r;
  emit(out, {{"event", "result"}, {"record", record_to_json(r)}});
}

Session replay(const ExperimentConfig& config, const TrialSpec& spec, Mode mode,
               const std::vector<OperatorInput>& log) {
  Session s(config, spec, mode);
  for (const auto& in : log) s.handle(in);
  return s;
}

}  // namespace assist
