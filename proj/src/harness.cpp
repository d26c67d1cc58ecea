#include "assist/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "assist/error.hpp"

namespace assist {

using nlohmann::json;

namespace {

OperatorInput command(UserCommand c) {
  OperatorInput in;
  in.command = c;
  return in;
}

OperatorInput jog_input(JogCommand c) {
  OperatorInput in;
  in.jog = c;
  return in;
}

OperatorInput give_up() {
  OperatorInput in;
  in.give_up = true;
  return in;
}

int count_events(const Session& s, const std::string& event, const std::string& kind) {
  int n = 0;
  for (const auto& ev : s.events()) {
    if (ev.at("event") == event && ev.value("kind", std::string{}) == kind) ++n;
  }
  return n;
}

// Menu item the operator means: right label, closest to where the object
// appears in the view.
std::optional<int> desired_item(const Session& s) {
  const SceneObject& obj = s.world().scene.at(s.spec().object_id);
  const Vec2 c = obj.footprint().center;
  const MarkerView& view = s.true_view();
  const Vec2 px = view.camera.project(view.camera_from_table.apply(Vec3(c.x(), c.y(), obj.height() / 2)));
  std::optional<int> best;
  double best_d = 0;
  const auto& items = s.state().menu.items;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].label != s.spec().target_class) continue;
    const PixelBox& b = items[i].bbox;
    const double d = (Vec2((b.u_min + b.u_max) / 2.0, (b.v_min + b.v_max) / 2.0) - px).norm();
    if (!best || d < best_d) {
      best = static_cast<int>(i);
      best_d = d;
    }
  }
  return best;
}

}  // namespace

OperatorInput semiauto_policy(const Session& s) {
  const SessionState& st = s.state();
  switch (st.phase) {
    case TaskPhase::ObjectMenu: {
      if (count_events(s, "outcome", "pick") >= s.config().max_pick_attempts) return give_up();
      const auto want = desired_item(s);
      if (!want) return give_up();
      const int n = static_cast<int>(st.menu.items.size());
      if (st.menu.highlighted == *want) return command(UserCommand::select());
      const int right = ((*want - st.menu.highlighted) % n + n) % n;
      return command(right <= n - right ? UserCommand::right() : UserCommand::left());
    }
    case TaskPhase::ActionMenu: {
      const auto want = desired_item(s);
      if (!want || st.menu.highlighted != *want) return command(UserCommand::back());
      return command(UserCommand::select());
    }
    case TaskPhase::PlacePointing: {
      // The operator puts the marker where they see the target spot.
      const MarkerView& view = s.true_view();
      const Vec3 t(s.spec().target.x(), s.spec().target.y(), 0.0);
      const Vec2 px = view.camera.project(view.camera_from_table.apply(t));
      const Vec2 d = px - st.marker.pixel;
      if (d.norm() > 1e-9 && !st.warning) return command(UserCommand::marker_move(d.x(), d.y()));
      return command(UserCommand::select());
    }
    default:
      return give_up();
  }
}

OperatorInput cartesian_policy(const Session& s) {
  const World& w = s.world();
  const RobotConfig& robot = s.config().robot;
  const PlannerParams& p = s.config().planner;
  const double lin = p.step_lin / 2 + 1e-9;
  const SceneObject& obj = w.scene.at(s.spec().object_id);
  const RigidTransform tg = table_from_gripper(robot.chain, w.q);
  const Vec3 tcp = tg.translation();
  const Mat3 base_from_table = robot.chain.base_from_table().rotation_matrix();

  const nlohmann::json* last = nullptr;
  for (auto it = s.events().rbegin(); it != s.events().rend(); ++it) {
    if (it->at("event") == "jog") {
      last = &*it;
      break;
    }
  }
  const bool last_rejected = last && last->at("rejected").get<bool>();
  const std::string last_cmd = last ? last->at("cmd").get<std::string>() : "";
  const auto issue = [&](JogCommand c) {
    // A repeat of a rejected jog would loop forever.
    if (last_rejected && last_cmd == to_string(c)) return give_up();
    return jog_input(c);
  };
  const auto move_xy = [&](const Vec2& delta_table) -> std::optional<OperatorInput> {
    const Vec3 d = base_from_table * Vec3(delta_table.x(), delta_table.y(), 0);
    if (d.x() > lin) return issue(JogCommand::TxPlus);
    if (d.x() < -lin) return issue(JogCommand::TxMinus);
    if (d.y() > lin) return issue(JogCommand::TyPlus);
    if (d.y() < -lin) return issue(JogCommand::TyMinus);
    return std::nullopt;
  };

  const bool holding = w.held && w.held->id == obj.id;
  if (!holding) {
    if (last_cmd == "CLOSE") return give_up();  // closed on nothing
    if (!w.gripper_open) return issue(JogCommand::Open);
    const Box3D box = obj.bounding_box();
    const GraspCandidate g = propose_grasps(box, robot.gripper).front();
    const double z_grasp = box.top() - std::min(g.rect.h / 2, box.half_extents.z());
    const Vec3 x_axis = tg.rotation_matrix().col(0);
    const double diff = wrap_half_pi(g.rect.theta - std::atan2(x_axis.y(), x_axis.x()));
    if (std::abs(diff) > p.step_ang / 2 + 1e-9 && !(last_rejected && last_cmd == "ROT")) {
      return jog_input(JogCommand::Rot);
    }
    if (auto m = move_xy(Vec2(g.rect.x, g.rect.y) - tcp.head<2>())) return *m;
    if (tcp.z() - z_grasp > lin) return issue(JogCommand::TzMinus);
    return issue(JogCommand::Close);
  }

  const Vec2 center = obj.footprint().center;
  const double bottom = obj.pose.translation().z() + obj.local_min().z();
  const Vec2 to_target = s.spec().target - center;
  const Vec3 to_target_base = base_from_table * Vec3(to_target.x(), to_target.y(), 0);
  const bool at_target = std::abs(to_target_base.x()) <= lin && std::abs(to_target_base.y()) <= lin;
  if (!at_target) {
    if (bottom < p.lift_height - lin) return issue(JogCommand::TzPlus);
    return *move_xy(to_target);
  }
  if (bottom - p.release_clearance > lin) return issue(JogCommand::TzMinus);
  return issue(JogCommand::Open);
}

TrialRun run_trial(const ExperimentConfig& config, ObjectClass target_class, int trial, Mode mode, int max_inputs) {
  Session s(config, make_trial(config, target_class, trial), mode);
  for (int i = 0; i < max_inputs && !s.finished(); ++i) {
    s.handle(mode == Mode::SemiAuto ? semiauto_policy(s) : cartesian_policy(s));
  }
  if (!s.finished()) s.handle(give_up());
  return {*s.result(), s.inputs(), s.transcript()};
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& config, const std::vector<ObjectClass>& classes,
                                    int trials_per_class, Mode mode) {
  std::vector<TrialRecord> out;
  for (ObjectClass c : classes) {
    for (int t = 0; t < trials_per_class; ++t) out.push_back(run_trial(config, c, t, mode).record);
  }
  return out;
}

Stat summarize(const std::vector<double>& values) {
  Stat s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

Report make_report(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "report needs at least one trial record");
  Report rep;
  rep.mode = std::string(to_string(records.front().mode));
  std::vector<ObjectClass> order;
  std::map<ObjectClass, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) {
    if (!groups.count(r.object_class)) order.push_back(r.object_class);
    groups[r.object_class].push_back(&r);
    if (std::string(to_string(r.mode)) != rep.mode) rep.mode = "mixed";
  }
  for (ObjectClass c : order) {
    ReportRow row;
    row.label = std::string(to_string(c));
    std::vector<double> pick_t, place_t;
    double commands = 0;
    for (const TrialRecord* r : groups[c]) {
      ++row.trials;
      if (r->picked) {
        row.picked += 1;
        pick_t.push_back(r->pickup_time);
      }
      if (r->placed) {
        row.placed += 1;
        place_t.push_back(r->place_time);
      }
      commands += r->n_commands;
    }
    row.commands = commands / row.trials;
    if (!pick_t.empty()) row.pickup_time = summarize(pick_t);
    if (!place_t.empty()) row.place_time = summarize(place_t);
    rep.total_trials += row.trials;
    rep.total_placed += static_cast<int>(row.placed);
    rep.rows.push_back(row);
  }
  // Average row: arithmetic mean of the class-row values.
  ReportRow avg;
  avg.label = "average";
  const double n = static_cast<double>(rep.rows.size());
  std::vector<double> pm, ps, lm, ls;
  double trials = 0;
  for (const auto& row : rep.rows) {
    trials += row.trials;
    avg.picked += row.picked / n;
    avg.placed += row.placed / n;
    avg.commands += row.commands / n;
    if (row.pickup_time) {
      pm.push_back(row.pickup_time->mean);
      ps.push_back(row.pickup_time->stddev);
    }
    if (row.place_time) {
      lm.push_back(row.place_time->mean);
      ls.push_back(row.place_time->stddev);
    }
  }
  avg.trials = static_cast<int>(std::lround(trials / n));
  const auto mean_of = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  if (!pm.empty()) avg.pickup_time = Stat{static_cast<int>(pm.size()), mean_of(pm), mean_of(ps)};
  if (!lm.empty()) avg.place_time = Stat{static_cast<int>(lm.size()), mean_of(lm), mean_of(ls)};
  rep.average = avg;
  return rep;
}

namespace {

json stat_json(const std::optional<Stat>& s) {
  if (!s) return nullptr;
  return {{"n", s->n}, {"mean", s->mean}, {"stddev", s->stddev}};
}

json row_json(const ReportRow& r) {
  return {{"object", r.label},   {"trials", r.trials},
          {"picked", r.picked},  {"pickup_time", stat_json(r.pickup_time)},
          {"placed", r.placed},  {"place_time", stat_json(r.place_time)},
          {"commands", r.commands}};
}

std::string fmt(const char* f, double a, double b = 0) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string time_cell(const std::optional<Stat>& s) {
  return s ? fmt("%.1f ± %.1f", s->mean, s->stddev) : "-";
}

}  // namespace

json report_to_json(const Report& report) {
  json rows = json::array();
  for (const auto& r : report.rows) rows.push_back(row_json(r));
  return {{"mode", report.mode},
          {"rows", rows},
          {"average", row_json(report.average)},
          {"total_trials", report.total_trials},
          {"total_placed", report.total_placed},
          {"success_rate", static_cast<double>(report.total_placed) / report.total_trials}};
}

std::string report_to_text(const Report& report) {
  const std::vector<std::string> head{"object", "picked up", "pickup time (s)", "place", "place time (s)",
                                      "# commands"};
  std::vector<std::vector<std::string>> cells;
  const auto add = [&](const ReportRow& r, bool average) {
    const char* count_fmt = average ? "%.1f/%.0f" : "%.0f/%.0f";
    cells.push_back({r.label, fmt(count_fmt, r.picked, r.trials), time_cell(r.pickup_time),
                     fmt(count_fmt, r.placed, r.trials), time_cell(r.place_time), fmt("%.1f", r.commands)});
  };
  for (const auto& r : report.rows) add(r, false);
  add(report.average, true);

  // Display width in code points so "±" aligns.
  const auto width = [](const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
  };
  std::vector<std::size_t> w(head.size());
  for (std::size_t i = 0; i < head.size(); ++i) {
    w[i] = width(head[i]);
    for (const auto& row : cells) w[i] = std::max(w[i], width(row[i]));
  }
  const auto line = [&](const std::vector<std::string>& row) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string pad(w[i] - width(row[i]), ' ');
      out += i == 0 ? row[i] + pad : "  " + pad + row[i];
    }
    return out + "\n";
  };
  std::string out = "mode: " + report.mode + "\n" + line(head);
  std::size_t total = 0;
  for (std::size_t i = 0; i < w.size(); ++i) total += w[i] + (i ? 2 : 0);
  const std::string rule(total, '-');
  out += rule + "\n";
  for (std::size_t i = 0; i + 1 < cells.size(); ++i) out += line(cells[i]);
  out += rule + "\n" + line(cells.back());
  return out;
}

std::string records_to_jsonl(const std::vector<TrialRecord>& records) {
  std::string out;
  for (const auto& r : records) out += record_to_json(r).dump() + "\n";
  return out;
}

std::vector<TrialRecord> records_from_jsonl(const std::string& text) {
  std::vector<TrialRecord> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, std::string("bad record line: ") + e.what());
    }
  }
  return out;
}

}  // namespace assist
