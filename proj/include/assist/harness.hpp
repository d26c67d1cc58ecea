#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "assist/session.hpp"

namespace assist {

// Scripted operators. Each looks at what a user could see (menu, marker,
// camera view, and for the Cartesian operator the true object pose) and
// returns the next input.
OperatorInput semiauto_policy(const Session& session);
OperatorInput cartesian_policy(const Session& session);

struct TrialRun {
  TrialRecord record;
  std::vector<OperatorInput> log;
  std::string transcript;
};

// Runs one trial to completion with the scripted operator for `mode`.
TrialRun run_trial(const ExperimentConfig& config, ObjectClass target_class, int trial, Mode mode,
                   int max_inputs = 2000);

// One record per (class, trial) in class-then-trial order.
std::vector<TrialRecord> run_trials(const ExperimentConfig& config, const std::vector<ObjectClass>& classes,
                                    int trials_per_class, Mode mode);

struct Stat {
  int n = 0;
  double mean = 0;
  double stddev = 0;  // sample (n - 1) standard deviation; 0 when n < 2
};
Stat summarize(const std::vector<double>& values);

struct ReportRow {
  std::string label;
  int trials = 0;
  double picked = 0;  // counts for class rows, means of counts for the average row
  double placed = 0;
  std::optional<Stat> pickup_time;  // over picked trials
  std::optional<Stat> place_time;   // over placed trials
  double commands = 0;              // mean over all trials
};

struct Report {
  std::string mode;
  std::vector<ReportRow> rows;
  ReportRow average;  // arithmetic mean of the class rows
  int total_trials = 0;
  int total_placed = 0;
};

// Throws EmptyInput for no records.
Report make_report(const std::vector<TrialRecord>& records);
nlohmann::json report_to_json(const Report& report);
// Aligned text table, columns in the order: object, picked up, pickup time,
// place, place time, # commands.
std::string report_to_text(const Report& report);

std::string records_to_jsonl(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> records_from_jsonl(const std::string& text);

}  // namespace assist
