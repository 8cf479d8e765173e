#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "trajsim/measures.hpp"
#include "trajsim/timing.hpp"
#include "trajsim/worker_team.hpp"

namespace trajsim {

/// Which logical worker owns item j of a partitioned sequence.
enum class Assignment {
  kContiguous,   // equal consecutive chunks
  kInterleaved,  // j % workers
};

struct ParallelConfig {
  /// n_c: logical workers cooperating on one pair.
  std::size_t workers_per_pair = 64;
  /// Pairs evaluated concurrently in pair-per-worker batches.
  std::size_t batch_workers = 1;
  Assignment assignment = Assignment::kContiguous;
  /// OS threads hosting the logical workers of one pair; 0 means
  /// default_worker_count(). Logical worker w runs on thread w % threads.
  std::size_t max_threads = 0;

  void validate() const;
  std::size_t pair_threads() const;
};

/// Split of `items` indices over `workers` logical workers.
class Partition {
 public:
  Partition(std::size_t items, std::size_t workers, Assignment mode);

  std::size_t items() const noexcept { return items_; }
  std::size_t workers() const noexcept { return workers_; }
  std::size_t owner(std::size_t item) const noexcept;

  /// Calls f(j) for every item j in [lo, hi] owned by `worker`, ascending.
  template <class F>
  void for_each(std::size_t worker, std::size_t lo, std::size_t hi, F&& f) const {
    if (items_ == 0 || lo > hi) return;
    if (mode_ == Assignment::kContiguous) {
      const std::size_t begin = std::max(lo, worker * chunk_);
      const std::size_t end = std::min({hi + 1, (worker + 1) * chunk_, items_});
      for (std::size_t j = begin; j < end; ++j) f(j);
    } else {
      std::size_t j = lo + (worker + workers_ - lo % workers_) % workers_;
      const std::size_t end = std::min(hi + 1, items_);
      for (; j < end; j += workers_) f(j);
    }
  }

  template <class F>
  void for_each(std::size_t worker, F&& f) const {
    if (items_ > 0) for_each(worker, 0, items_ - 1, std::forward<F>(f));
  }

 private:
  std::size_t items_;
  std::size_t workers_;
  Assignment mode_;
  std::size_t chunk_;
};

/// Anti-diagonal schedule of a (n+1) x (m+1) DP matrix. Slot ts holds the
/// cells (i, j) with i + j = ts; columns are owned by logical workers.
class WavefrontSchedule {
 public:
  WavefrontSchedule(std::size_t n, std::size_t m, std::size_t workers, Assignment mode);

  /// n + m + 1.
  std::size_t slots() const noexcept { return n_ + m_ + 1; }
  std::size_t first_column(std::size_t ts) const noexcept { return ts > n_ ? ts - n_ : 0; }
  std::size_t last_column(std::size_t ts) const noexcept { return std::min(ts, m_); }
  const Partition& columns() const noexcept { return columns_; }
  std::size_t rows() const noexcept { return n_; }
  std::size_t cols() const noexcept { return m_; }

  /// Buffer rows read (older diagonal, newer diagonal) and written at slot ts.
  static std::size_t older_row(std::size_t ts) noexcept { return ts % 3; }
  static std::size_t newer_row(std::size_t ts) noexcept { return (ts + 1) % 3; }
  static std::size_t write_row(std::size_t ts) noexcept { return (ts + 2) % 3; }

 private:
  std::size_t n_;
  std::size_t m_;
  Partition columns_;
};

/// Three rotating rows of |b|+1 cells holding the last anti-diagonals.
class ScoreBuffer {
 public:
  explicit ScoreBuffer(std::size_t cols) : cols_(cols), values_(3 * cols, 0.0) {}

  std::size_t rows() const noexcept { return 3; }
  std::size_t cols() const noexcept { return cols_; }
  double read(std::size_t row, std::size_t col, std::size_t /*slot*/) const { return values_[row * cols_ + col]; }
  void write(std::size_t row, std::size_t col, std::size_t /*slot*/, double v) { values_[row * cols_ + col] = v; }
  double value(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }

 private:
  std::size_t cols_;
  std::vector<double> values_;
};

/// ScoreBuffer that tags every write with its slot and checks every read:
/// a read at slot ts must see a cell written at ts-1 or ts-2 in the row the
/// rotation assigns to that diagonal. Same-slot reads and stale reads are counted.
class InstrumentedScoreBuffer {
 public:
  explicit InstrumentedScoreBuffer(std::size_t cols);

  std::size_t rows() const noexcept { return 3; }
  std::size_t cols() const noexcept { return cols_; }
  double read(std::size_t row, std::size_t col, std::size_t slot) const;
  void write(std::size_t row, std::size_t col, std::size_t slot, double v);
  double value(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }

  std::size_t reads() const noexcept { return reads_.load(); }
  std::size_t writes() const noexcept { return writes_.load(); }
  std::size_t same_slot_hazards() const noexcept { return same_slot_.load(); }
  std::size_t stale_reads() const noexcept { return stale_.load(); }

 private:
  std::size_t cols_;
  std::vector<double> values_;
  std::unique_ptr<std::atomic<long>[]> written_at_;
  mutable std::atomic<std::size_t> reads_{0};
  std::atomic<std::size_t> writes_{0};
  mutable std::atomic<std::size_t> same_slot_{0};
  mutable std::atomic<std::size_t> stale_{0};
};

/// Linear-scan measures (SPD, CDDS, SAR): points / paired samples split over
/// the logical workers, partial sums reduced in ascending worker order.
double par_scan(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg);
double par_scan(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg,
                WorkerTeam& team);

/// DP measures on the anti-diagonal wavefront with a 3-row ScoreBuffer and a
/// barrier after every slot.
double par_dp(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg);
double par_dp(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg,
              WorkerTeam& team);
/// Same computation against an instrumented buffer (for schedule checks).
double par_dp_instrumented(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b,
                           const ParallelConfig& cfg, InstrumentedScoreBuffer& buffer);

/// Enumeration measures (Hausdorff, OWD): columns of b split over the logical
/// workers, per-worker minima harvested on one thread.
double par_enum(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg);
double par_enum(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg,
                WorkerTeam& team);

/// Routes to par_scan / par_dp / par_enum by measure class.
double par_evaluate(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg);
double par_evaluate(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg,
                    WorkerTeam& team);

enum class BatchMode {
  kIntraPair,     // pairs one after another, n_c workers on each
  kPairPerWorker  // whole pairs spread over batch_workers, sequential kernels
};

struct BatchResult {
  std::vector<double> scores;  // input pair order
  TimingBreakdown timing;
};

/// Throws BatchError naming the first failing pair; ParameterError for an empty batch.
BatchResult run_batch(const MeasureSpec& spec, std::span<const TrajectoryPair> pairs, const ParallelConfig& cfg,
                      BatchMode mode);

}  // namespace trajsim
