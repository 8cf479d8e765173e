#include "trajsim/report.hpp"

#include <algorithm>
#include <cmath>

namespace trajsim {

using nlohmann::json;

TimingBreakdown BenchReport::mean() const {
  TimingBreakdown m;
  if (runs.empty()) return m;
  for (const auto& r : runs) m += r;
  const double n = static_cast<double>(runs.size());
  m.pre_s /= n;
  m.emb_s /= n;
  m.cmp_s /= n;
  m.total_s /= n;
  return m;
}

json timing_json(const TimingBreakdown& t) {
  return {{"pre_s", t.pre_s}, {"emb_s", t.emb_s}, {"cmp_s", t.cmp_s}, {"total_s", t.total_s}};
}

json BenchReport::to_json() const {
  json runs_json = json::array();
  for (const auto& r : runs) runs_json.push_back(timing_json(r));
  json doc = {{"experiment", experiment},
              {"status", status},
              {"config", config},
              {"dataset", dataset},
              {"mode", mode.empty() ? json(nullptr) : json(mode)},
              {"workers",
               {{"workers", workers.workers},
                {"workers_per_pair", workers.workers_per_pair},
                {"batch_size", workers.batch_size}}},
              {"repetitions", repetitions},
              {"runs", runs_json},
              {"timing", timing_json(mean())},
              {"accuracy", accuracy},
              {"process_setup_s", process_setup_s},
              {"sub_timings", sub_timings},
              {"outputs", outputs},
              {"results", results}};
  return doc;
}

namespace {

const char* const kTimingFields[] = {"pre_s", "emb_s", "cmp_s", "total_s"};
constexpr double kSlack = 1e-3;

void check_timing(const json& t, const std::string& where, std::vector<std::string>& out) {
  if (!t.is_object()) {
    out.push_back(where + " must be an object");
    return;
  }
  double max_part = 0.0, parts = 0.0;
  for (const char* f : kTimingFields) {
    if (!t.contains(f) || !t[f].is_number()) {
      out.push_back(where + "." + f + " must be a number");
      return;
    }
    const double v = t[f].get<double>();
    if (!(v >= 0.0)) out.push_back(where + "." + f + " must be >= 0");
    if (std::string(f) != "total_s") {
      max_part = std::max(max_part, v);
      parts += v;
    }
  }
  const double total = t["total_s"].get<double>();
  if (total + kSlack * std::max(1.0, total) < max_part) out.push_back(where + ".total_s below a component");
  if (parts > total + kSlack * std::max(1.0, total) + 0.05 * total) {
    out.push_back(where + " components exceed total_s beyond scheduling slack");
  }
}

}  // namespace

std::vector<std::string> validate_report(const json& doc) {
  std::vector<std::string> out;
  if (!doc.is_object()) return {"report must be a JSON object"};
  auto need = [&](const char* key, bool ok, const char* what) {
    if (!doc.contains(key)) {
      out.push_back(std::string("missing field '") + key + "'");
      return false;
    }
    if (!ok) out.push_back(std::string("field '") + key + "' must be " + what);
    return ok;
  };
  static const std::vector<std::string> kinds = {"sim", "knn", "cluster", "embed", "index"};
  if (need("experiment", doc.contains("experiment") && doc["experiment"].is_string(), "a string") &&
      std::find(kinds.begin(), kinds.end(), doc["experiment"].get<std::string>()) == kinds.end()) {
    out.push_back("unknown experiment '" + doc["experiment"].get<std::string>() + "'");
  }
  bool ok_status = false;
  if (need("status", doc.contains("status") && doc["status"].is_string(), "a string")) {
    const auto s = doc["status"].get<std::string>();
    if (s != "ok" && s != "OT") out.push_back("status must be 'ok' or 'OT'");
    ok_status = s == "ok";
  }
  need("config", doc.contains("config") && doc["config"].is_object(), "an object");
  need("dataset", doc.contains("dataset") && doc["dataset"].is_object(), "an object");
  if (need("mode", doc.contains("mode") && (doc["mode"].is_null() || doc["mode"].is_string()), "null or a string") &&
      doc["mode"].is_string() && doc["mode"] != "single" && doc["mode"] != "batched") {
    out.push_back("mode must be 'single' or 'batched'");
  }
  if (need("workers", doc.contains("workers") && doc["workers"].is_object(), "an object")) {
    for (const char* f : {"workers", "workers_per_pair", "batch_size"}) {
      const auto& w = doc["workers"];
      if (!w.contains(f) || !w[f].is_number_unsigned() || w[f].get<std::size_t>() < 1) {
        out.push_back(std::string("workers.") + f + " must be an integer >= 1");
      }
    }
  }
  std::size_t reps = 0;
  if (need("repetitions", doc.contains("repetitions") && doc["repetitions"].is_number_unsigned(), "an integer")) {
    reps = doc["repetitions"].get<std::size_t>();
    if (reps < 1) out.push_back("repetitions must be >= 1");
  }
  if (need("runs", doc.contains("runs") && doc["runs"].is_array(), "an array")) {
    const auto& runs = doc["runs"];
    for (std::size_t i = 0; i < runs.size(); ++i) check_timing(runs[i], "runs[" + std::to_string(i) + "]", out);
    if (ok_status && runs.size() != reps) out.push_back("runs must hold one entry per repetition");
    if (!ok_status && runs.size() > reps) out.push_back("runs exceed repetitions");
  }
  if (need("timing", doc.contains("timing"), "an object")) {
    check_timing(doc["timing"], "timing", out);
    if (out.empty() && !doc["runs"].empty()) {
      for (const char* f : kTimingFields) {
        double sum = 0.0;
        for (const auto& r : doc["runs"]) sum += r[f].get<double>();
        const double mean = sum / static_cast<double>(doc["runs"].size());
        const double got = doc["timing"][f].get<double>();
        if (std::fabs(mean - got) > 1e-9 * std::max(1.0, std::fabs(mean))) {
          out.push_back(std::string("timing.") + f + " is not the mean of runs");
        }
      }
    }
  }
  need("accuracy", doc.contains("accuracy") && doc["accuracy"].is_object(), "an object");
  if (need("process_setup_s", doc.contains("process_setup_s") && doc["process_setup_s"].is_number(), "a number") &&
      doc["process_setup_s"].get<double>() < 0.0) {
    out.push_back("process_setup_s must be >= 0");
  }
  if (doc.contains("accuracy") && doc["accuracy"].is_object()) {
    for (const char* f : {"hr_at_k", "rand_index", "pair_recall"}) {
      const auto& a = doc["accuracy"];
      if (a.contains(f) && (!a[f].is_number() || a[f].get<double>() < 0.0 || a[f].get<double>() > 1.0)) {
        out.push_back(std::string("accuracy.") + f + " must be in [0, 1]");
      }
    }
  }
  return out;
}

}  // namespace trajsim
