#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "assist/harness.hpp"
#include "assist/server.hpp"

using namespace assist;

namespace {

std::atomic<bool> g_interrupted{false};

struct ConfigPaths {
  std::string experiment;
  std::string arm;
  std::string noise;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app) {
    app->add_option("--config", experiment, "experiment config file")->check(CLI::ExistingFile);
    app->add_option("--arm", arm, "arm config file")->check(CLI::ExistingFile);
    app->add_option("--noise", noise, "noise config file")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "experiment seed (overrides the config)");
  }
  ExperimentConfig load() const {
    ExperimentConfig c = ExperimentConfig::load(experiment, arm, noise);
    if (seed) c.seed = *seed;
    return c;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
}

std::vector<ObjectClass> parse_classes(const std::vector<std::string>& names) {
  if (names.empty()) return {kAllClasses.begin(), kAllClasses.end()};
  std::vector<ObjectClass> out;
  for (const auto& n : names) out.push_back(class_from_string(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-autonomous pick-and-place simulator"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "run one trial as a TCP (and WebSocket) session");
  ConfigPaths serve_cfg;
  serve_cfg.add(serve);
  std::string serve_host = "127.0.0.1";
  unsigned short serve_port = 7400;
  std::optional<unsigned short> serve_ws;
  std::string serve_mode = "semiauto", serve_class = "ball", serve_transcript;
  int serve_trial = 0;
  bool serve_exit = false;
  serve->add_option("--host", serve_host, "listen address");
  serve->add_option("--port", serve_port, "TCP port (0 = any)");
  serve->add_option("--ws-port", serve_ws, "WebSocket bridge port");
  serve->add_option("--mode", serve_mode, "semiauto | cartesian");
  serve->add_option("--class", serve_class, "target object class");
  serve->add_option("--trial", serve_trial, "trial index");
  serve->add_option("--transcript", serve_transcript, "transcript output path (JSONL)");
  serve->add_flag("--exit-on-finish", serve_exit, "stop once the trial has a result");

  // run
  auto* run = app.add_subcommand("run", "run seeded trials with the scripted operator");
  ConfigPaths run_cfg;
  run_cfg.add(run);
  std::string run_mode = "semiauto", run_out, run_report, run_logs;
  std::vector<std::string> run_classes;
  std::optional<int> run_trials_n;
  run->add_option("--mode", run_mode, "semiauto | cartesian");
  run->add_option("--class", run_classes, "restrict to these classes");
  run->add_option("--trials", run_trials_n, "trials per class");
  run->add_option("--out", run_out, "records output (JSONL)");
  run->add_option("--report", run_report, "report output (JSON)");
  run->add_option("--logs", run_logs, "directory for per-trial command logs and transcripts");

  // report
  auto* report = app.add_subcommand("report", "render a report from records");
  std::string report_in;
  bool report_json = false;
  report->add_option("records", report_in, "records file (JSONL)")->required()->check(CLI::ExistingFile);
  report->add_flag("--json", report_json, "print JSON instead of the table");

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "replay a command log in process");
  ConfigPaths replay_cfg;
  replay_cfg.add(replay_cmd);
  std::string replay_log, replay_mode = "semiauto", replay_class = "ball", replay_transcript;
  int replay_trial = 0;
  replay_cmd->add_option("log", replay_log, "command log (JSONL)")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--mode", replay_mode, "semiauto | cartesian");
  replay_cmd->add_option("--class", replay_class, "target object class");
  replay_cmd->add_option("--trial", replay_trial, "trial index");
  replay_cmd->add_option("--transcript", replay_transcript, "transcript output path (JSONL)");

  // client
  auto* client = app.add_subcommand("client", "stream a command log to a running session");
  std::string client_host = "127.0.0.1", client_log;
  unsigned short client_port = 7400;
  bool client_ws = false, client_verbose = false;
  client->add_option("log", client_log, "command log (JSONL)")->required()->check(CLI::ExistingFile);
  client->add_option("--host", client_host, "server address");
  client->add_option("--port", client_port, "server port");
  client->add_flag("--ws", client_ws, "use the WebSocket bridge");
  client->add_flag("-v,--verbose", client_verbose, "print every received message");

  // scene
  auto* scene = app.add_subcommand("scene", "print the seeded scene of a trial");
  ConfigPaths scene_cfg;
  scene_cfg.add(scene);
  std::string scene_class = "ball";
  int scene_trial = 0;
  scene->add_option("--class", scene_class, "target object class");
  scene->add_option("--trial", scene_trial, "trial index");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      const ExperimentConfig cfg = serve_cfg.load();
      const Mode mode = mode_from_string(serve_mode);
      ServerOptions opts;
      opts.host = serve_host;
      opts.port = serve_port;
      opts.ws_port = serve_ws;
      opts.transcript_path = serve_transcript;
      Server server(cfg, make_trial(cfg, class_from_string(serve_class), serve_trial), mode, opts);
      server.start();
      std::cerr << "listening on " << serve_host << ":" << server.port();
      if (server.ws_port()) std::cerr << " (ws " << *server.ws_port() << ")";
      std::cerr << std::endl;
      std::signal(SIGINT, [](int) { g_interrupted = true; });
      std::signal(SIGTERM, [](int) { g_interrupted = true; });
      while (!g_interrupted) {
        if (server.wait_finished(std::chrono::milliseconds(200)) && serve_exit) {
          std::this_thread::sleep_for(std::chrono::milliseconds(200));  // let the last messages drain
          break;
        }
      }
      server.stop();
      if (auto r = server.result()) std::cout << record_to_json(*r).dump() << "\n";
      return 0;
    }
    if (*run) {
      ExperimentConfig cfg = run_cfg.load();
      if (run_trials_n) cfg.trials_per_class = *run_trials_n;
      const Mode mode = mode_from_string(run_mode);
      std::vector<TrialRecord> records;
      if (!run_logs.empty()) std::filesystem::create_directories(run_logs);
      for (ObjectClass c : parse_classes(run_classes)) {
        for (int t = 0; t < cfg.trials_per_class; ++t) {
          TrialRun tr = run_trial(cfg, c, t, mode);
          if (!run_logs.empty()) {
            const std::string stem = run_logs + "/" + class_token(c) + "_" + std::to_string(t);
            write_file(stem + ".log.jsonl", format_command_log(tr.log));
            write_file(stem + ".transcript.jsonl", tr.transcript);
          }
          records.push_back(tr.record);
        }
      }
      const Report rep = make_report(records);
      if (!run_out.empty()) write_file(run_out, records_to_jsonl(records));
      if (!run_report.empty()) write_file(run_report, report_to_json(rep).dump(2) + "\n");
      std::cout << report_to_text(rep);
      return 0;
    }
    if (*report) {
      const Report rep = make_report(records_from_jsonl(read_file(report_in)));
      std::cout << (report_json ? report_to_json(rep).dump(2) + "\n" : report_to_text(rep));
      return 0;
    }
    if (*replay_cmd) {
      const ExperimentConfig cfg = replay_cfg.load();
      const Session s = replay(cfg, make_trial(cfg, class_from_string(replay_class), replay_trial),
                               mode_from_string(replay_mode), parse_command_log(read_file(replay_log)));
      if (!replay_transcript.empty()) write_file(replay_transcript, s.transcript());
      if (s.result()) {
        std::cout << record_to_json(*s.result()).dump() << "\n";
      } else {
        std::cout << "unfinished at phase " << to_string(s.state().phase) << "\n";
      }
      return 0;
    }
    if (*client) {
      const ClientRun r = run_client(client_host, client_port, parse_command_log(read_file(client_log)),
                                     client_ws ? Transport::WebSocket : Transport::Tcp);
      if (client_verbose) {
        for (const auto& m : r.received) std::cout << encode(m);
      }
      if (r.record) {
        std::cout << record_to_json(*r.record).dump() << "\n";
      } else {
        std::cout << "no result\n";
      }
      return 0;
    }
    if (*scene) {
      const ExperimentConfig cfg = scene_cfg.load();
      const TrialSpec spec = make_trial(cfg, class_from_string(scene_class), scene_trial);
      std::cout << serialize_scene(spec.scene);
      std::cout << "# object " << spec.object_id << " target " << spec.target.x() << " " << spec.target.y() << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
