#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <chrono>

#include "assist/harness.hpp"
#include "assist/perception.hpp"
#include "assist/planner.hpp"
#include "assist/protocol.hpp"
#include "assist/server.hpp"

namespace py = pybind11;
using namespace assist;

namespace {

// JSON crosses the boundary as text; the Python side wraps with json.loads.
std::string dump(const nlohmann::json& j) { return j.dump(); }

ObjectClass cls(const std::string& name) { return class_from_string(name); }
Mode mode(const std::string& name) { return mode_from_string(name); }

Eigen::Matrix4d to_matrix(const RigidTransform& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = t.rotation_matrix();
  m.topRightCorner<3, 1>() = t.translation();
  return m;
}

JointConfig joints(const Eigen::VectorXd& q) {
  if (q.size() != kDof) throw Error(ErrorCode::InvalidArgument, "expected 7 joint values");
  return q;
}

std::vector<ObjectClass> classes_of(const std::vector<std::string>& names) {
  std::vector<ObjectClass> out;
  if (names.empty()) return {kAllClasses.begin(), kAllClasses.end()};
  for (const auto& n : names) out.push_back(cls(n));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simulated assistive pick-and-place core.";

  py::register_exception<Error>(m, "AssistError", PyExc_RuntimeError);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_static("load", &ExperimentConfig::load, py::arg("experiment"), py::arg("arm") = "",
                  py::arg("noise") = "")
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("trials_per_class", &ExperimentConfig::trials_per_class)
      .def_readwrite("displacement", &ExperimentConfig::displacement)
      .def_readwrite("place_margin", &ExperimentConfig::place_margin)
      .def_readwrite("fiducial_noise_px", &ExperimentConfig::fiducial_noise_px)
      .def_property(
          "noise",
          [](const ExperimentConfig& c) {
            return py::dict(py::arg("jitter_px") = c.noise.jitter_px, py::arg("miss_rate") = c.noise.miss_rate,
                            py::arg("confusion_rate") = c.noise.confusion_rate, py::arg("seed") = c.noise.seed);
          },
          [](ExperimentConfig& c, const py::dict& d) {
            if (d.contains("jitter_px")) c.noise.jitter_px = d["jitter_px"].cast<double>();
            if (d.contains("miss_rate")) c.noise.miss_rate = d["miss_rate"].cast<double>();
            if (d.contains("confusion_rate")) c.noise.confusion_rate = d["confusion_rate"].cast<double>();
            if (d.contains("seed")) c.noise.seed = d["seed"].cast<std::uint64_t>();
          });

  m.def("class_names", [] {
    std::vector<std::string> out;
    for (ObjectClass c : kAllClasses) out.emplace_back(to_string(c));
    return out;
  });

  m.def("make_trial", [](const ExperimentConfig& c, const std::string& name, int trial) {
    const TrialSpec s = make_trial(c, cls(name), trial);
    return dump({{"class", to_string(s.target_class)},
                 {"trial", s.trial},
                 {"seed", s.seed},
                 {"object_id", s.object_id},
                 {"pickup", {s.pickup.x(), s.pickup.y()}},
                 {"target", {s.target.x(), s.target.y()}},
                 {"scene", scene_to_json(s.scene)}});
  });

  m.def(
      "run_trial",
      [](const ExperimentConfig& c, const std::string& name, int trial, const std::string& md) {
        TrialRun run;
        {
          py::gil_scoped_release release;
          run = run_trial(c, cls(name), trial, mode(md));
        }
        return py::make_tuple(dump(record_to_json(run.record)), format_command_log(run.log), run.transcript);
      },
      py::arg("config"), py::arg("object_class"), py::arg("trial"), py::arg("mode") = "semiauto");

  m.def(
      "run_trials",
      [](const ExperimentConfig& c, const std::vector<std::string>& names, int per_class, const std::string& md) {
        std::vector<TrialRecord> records;
        {
          py::gil_scoped_release release;
          records = run_trials(c, classes_of(names), per_class, mode(md));
        }
        return records_to_jsonl(records);
      },
      py::arg("config"), py::arg("classes"), py::arg("trials_per_class"), py::arg("mode") = "semiauto");

  m.def("replay", [](const ExperimentConfig& c, const std::string& name, int trial, const std::string& md,
                     const std::string& log) {
    const Session s = replay(c, make_trial(c, cls(name), trial), mode(md), parse_command_log(log));
    return s.transcript();
  });

  m.def("report", [](const std::string& jsonl) {
    const Report r = make_report(records_from_jsonl(jsonl));
    return py::make_tuple(dump(report_to_json(r)), report_to_text(r));
  });

  m.def(
      "judge_place",
      [](const Eigen::Vector3d& final_center, const Eigen::Vector3d& target, const Eigen::Vector2d& half,
         double yaw, bool round, double margin) {
        return judge_place(final_center, target, Footprint{target.head<2>(), half, yaw, round}, margin);
      },
      py::arg("final_center"), py::arg("target"), py::arg("half"), py::arg("yaw") = 0.0, py::arg("round") = false,
      py::arg("margin") = 0.01);

  m.def("fk", [](const Eigen::VectorXd& q) { return to_matrix(fk(RobotConfig::defaults().chain, joints(q))); });
  m.def("jacobian", [](const Eigen::VectorXd& q) {
    return Eigen::MatrixXd(jacobian(RobotConfig::defaults().chain, joints(q)));
  });
  m.def("ready_pose", [] { return Eigen::VectorXd(RobotConfig::defaults().ready); });

  m.def(
      "plan_to_table_pose",
      [](double x, double y, double z, double theta, std::uint64_t seed) {
        const RobotConfig robot = RobotConfig::defaults();
        PlannerParams p;
        p.seed = seed;
        const auto goal = compose(robot.chain.base_from_table(),
                                  RigidTransform::from_matrix(FrameId::Table, FrameId::Gripper,
                                                              top_down_rotation(theta), Vec3(x, y, z)));
        Scene empty;
        empty.table_extent = SceneConfig{}.table_extent;
        empty.reachable_region = SceneConfig{}.reachable_region;
        const Trajectory t = plan_to_pose(robot.chain, robot.ready, PoseGoal{goal}, empty, p);
        Eigen::MatrixXd out(static_cast<Eigen::Index>(t.waypoints.size()), kDof);
        for (std::size_t i = 0; i < t.waypoints.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = t.waypoints[i];
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("theta") = 0.0, py::arg("seed") = 1);

  m.def("region_grow", [](const Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>& pts, double radius) {
    PointCloud c;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) c.points.push_back(pts.row(i).transpose());
    const PointCloud out = region_grow(c, radius);
    Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> res(static_cast<Eigen::Index>(out.size()), 3);
    for (std::size_t i = 0; i < out.size(); ++i) res.row(static_cast<Eigen::Index>(i)) = out.points[i].transpose();
    return res;
  });

  m.def("encode", [](std::uint64_t seq, const std::string& kind, const std::string& payload) {
    return encode({seq, message_kind_from_string(kind), nlohmann::json::parse(payload)});
  });
  m.def("decode", [](const std::string& line) {
    const Message msg = decode(line);
    return py::make_tuple(msg.seq, std::string(to_string(msg.kind)), dump(msg.payload));
  });

  py::class_<Server>(m, "Server")
      .def(py::init([](const ExperimentConfig& c, const std::string& name, int trial, const std::string& md,
                       unsigned short port, std::optional<unsigned short> ws_port) {
             ServerOptions opts;
             opts.port = port;
             opts.ws_port = ws_port;
             return std::make_unique<Server>(c, make_trial(c, cls(name), trial), mode(md), opts);
           }),
           py::arg("config"), py::arg("object_class"), py::arg("trial"), py::arg("mode") = "semiauto",
           py::arg("port") = 0, py::arg("ws_port") = std::nullopt)
      .def("start", &Server::start)
      .def("stop", &Server::stop, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("port", &Server::port)
      .def_property_readonly("ws_port", &Server::ws_port)
      .def(
          "wait_finished",
          [](Server& s, double timeout) {
            return s.wait_finished(std::chrono::milliseconds(static_cast<long>(timeout * 1000)));
          },
          py::call_guard<py::gil_scoped_release>())
      .def("transcript", &Server::transcript);
}
