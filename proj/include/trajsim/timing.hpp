#pragma once

#include <chrono>

namespace trajsim {

/// Wall-clock decomposition of one run, in seconds: input pre-processing,
/// embedding (0 for non-learned measures), similarity / index-scan computation.
struct TimingBreakdown {
  double pre_s = 0.0;
  double emb_s = 0.0;
  double cmp_s = 0.0;
  double total_s = 0.0;

  TimingBreakdown& operator+=(const TimingBreakdown& o) {
    pre_s += o.pre_s;
    emb_s += o.emb_s;
    cmp_s += o.cmp_s;
    total_s += o.total_s;
    return *this;
  }
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }
  /// Seconds since the last lap (or construction).
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
  std::chrono::steady_clock::time_point last_ = start_;
};

}  // namespace trajsim
