#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "trajsim/timing.hpp"

namespace trajsim {

struct WorkerCounts {
  std::size_t workers = 1;
  std::size_t workers_per_pair = 64;
  std::size_t batch_size = 512;
};

/// One benchmark invocation: `repetitions` runs and their mean timing.
struct BenchReport {
  std::string experiment;  // sim | knn | cluster | embed | index
  std::string status = "ok";  // ok | OT
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json dataset = nlohmann::json::object();
  std::string mode;  // single | batched; empty when not applicable
  WorkerCounts workers;
  std::size_t repetitions = 1;
  std::vector<TimingBreakdown> runs;
  nlohmann::json accuracy = nlohmann::json::object();
  double process_setup_s = 0.0;
  nlohmann::json sub_timings = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();

  /// Component-wise mean of runs.
  TimingBreakdown mean() const;
  nlohmann::json to_json() const;
};

nlohmann::json timing_json(const TimingBreakdown& t);

/// Problems found in a report document; empty when valid.
std::vector<std::string> validate_report(const nlohmann::json& doc);

}  // namespace trajsim
