#include "trajsim/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <optional>

#include "trajsim/detail/dp_kernels.hpp"
#include "trajsim/detail/harvest.hpp"
#include "trajsim/errors.hpp"

namespace trajsim {

namespace {

void require_class(const MeasureSpec& spec, MeasureClass cls, const char* algo) {
  if (measure_class(spec.kind) != cls) {
    throw ParameterError(std::string(algo) + " does not handle " + std::string(measure_name(spec.kind)));
  }
}

// Runs body(w) for each logical worker w hosted on `rank`.
template <class Body>
void for_hosted(std::size_t rank, std::size_t team_size, std::size_t workers, Body&& body) {
  for (std::size_t w = rank; w < workers; w += team_size) body(w);
}

ExactSum reduce_in_order(const std::vector<ExactSum>& partials) {
  ExactSum total;
  for (const auto& p : partials) total.merge(p);
  return total;
}

double scan_spd(const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg, WorkerTeam& team) {
  const std::size_t nw = cfg.workers_per_pair;
  const Partition part(a.size(), nw, cfg.assignment);
  std::vector<ExactSum> partial(nw);
  team.run([&](std::size_t rank) {
    for_hosted(rank, team.size(), nw, [&](std::size_t w) {
      part.for_each(w, [&](std::size_t i) { partial[w] += distance(a[i], b[i]); });
    });
  });
  return reduce_in_order(partial).value();
}

double scan_cdds(const Trajectory& a, const Trajectory& b, double eps, const ParallelConfig& cfg, WorkerTeam& team) {
  const TimePairing pairs = pair_by_time(a, b);
  if (pairs.size() < 2) return 0.0;
  const std::size_t nw = cfg.workers_per_pair;
  const Partition part(pairs.size() - 1, nw, cfg.assignment);
  std::vector<ExactSum> partial(nw);
  team.run([&](std::size_t rank) {
    for_hosted(rank, team.size(), nw, [&](std::size_t w) {
      part.for_each(w, [&](std::size_t k) { partial[w] += cdds_segment(a, b, pairs, k, eps); });
    });
  });
  return reduce_in_order(partial).value();
}

// SAX words of both trajectories, each pass split over the logical workers.
std::pair<sax::Word, sax::Word> scan_sax_words(const Trajectory& a, const Trajectory& b, const MeasureParams& p,
                                               const ParallelConfig& cfg, WorkerTeam& team) {
  const std::size_t nw = cfg.workers_per_pair;
  const std::size_t len = *p.sax_word_length;
  const Trajectory* trajs[2] = {&a, &b};
  const Partition parts[2] = {Partition(a.size(), nw, cfg.assignment), Partition(b.size(), nw, cfg.assignment)};

  std::vector<sax::CoordSums> sums(2 * nw), devs(2 * nw);
  team.run([&](std::size_t rank) {
    for_hosted(rank, team.size(), nw, [&](std::size_t w) {
      for (int s = 0; s < 2; ++s) {
        parts[s].for_each(w, [&](std::size_t i) { sax::add_coords(*trajs[s], i, sums[s * nw + w]); });
      }
    });
  });
  sax::CoordSums total_sums[2];
  double mean_x[2], mean_y[2];
  for (int s = 0; s < 2; ++s) {
    for (std::size_t w = 0; w < nw; ++w) total_sums[s].merge(sums[s * nw + w]);
    const double n = static_cast<double>(trajs[s]->size());
    mean_x[s] = total_sums[s].x.value() / n;
    mean_y[s] = total_sums[s].y.value() / n;
  }

  team.run([&](std::size_t rank) {
    for_hosted(rank, team.size(), nw, [&](std::size_t w) {
      for (int s = 0; s < 2; ++s) {
        parts[s].for_each(w, [&](std::size_t i) {
          sax::add_deviation(*trajs[s], i, mean_x[s], mean_y[s], devs[s * nw + w]);
        });
      }
    });
  });
  sax::Normalizer norm[2];
  for (int s = 0; s < 2; ++s) {
    sax::CoordSums total_dev;
    for (std::size_t w = 0; w < nw; ++w) total_dev.merge(devs[s * nw + w]);
    norm[s] = sax::make_normalizer(total_sums[s], total_dev, trajs[s]->size());
  }

  std::vector<sax::SegmentSums> segs(2 * nw, sax::SegmentSums(len));
  team.run([&](std::size_t rank) {
    for_hosted(rank, team.size(), nw, [&](std::size_t w) {
      for (int s = 0; s < 2; ++s) {
        parts[s].for_each(w, [&](std::size_t i) { sax::add_to_segment(*trajs[s], i, norm[s], segs[s * nw + w]); });
      }
    });
  });
  sax::SegmentSums total_a(len), total_b(len);
  for (std::size_t w = 0; w < nw; ++w) {
    total_a.merge(segs[w]);
    total_b.merge(segs[nw + w]);
  }
  return {sax::finish(a, total_a, *p.sax_alphabet), sax::finish(b, total_b, *p.sax_alphabet)};
}

double scan_sar(const Trajectory& a, const Trajectory& b, const MeasureParams& p, const ParallelConfig& cfg,
                WorkerTeam& team) {
  const auto [wa, wb] = scan_sax_words(a, b, p, cfg, team);
  const auto aligned = sax::aligned_segments(wa, wb);
  const std::size_t nw = cfg.workers_per_pair;
  const Partition part(aligned.size(), nw, cfg.assignment);
  std::vector<ExactSum> partial(nw);
  team.run([&](std::size_t rank) {
    for_hosted(rank, team.size(), nw, [&](std::size_t w) {
      part.for_each(w, [&](std::size_t k) {
        partial[w] += sax::segment_contribution(wa, wb, aligned[k].first, aligned[k].second, *p.sax_symbol_threshold);
      });
    });
  });
  return reduce_in_order(partial).value();
}

template <class Kernel, class Buffer>
double wavefront(const Kernel& kernel, const WavefrontSchedule& sched, WorkerTeam& team, Buffer& buf) {
  const std::size_t nw = sched.columns().workers();
  const std::size_t n_ts = sched.slots();
  team.run([&](std::size_t rank) {
    for (std::size_t ts = 0; ts < n_ts; ++ts) {
      const std::size_t older = WavefrontSchedule::older_row(ts);
      const std::size_t newer = WavefrontSchedule::newer_row(ts);
      const std::size_t out = WavefrontSchedule::write_row(ts);
      const std::size_t lo = sched.first_column(ts);
      const std::size_t hi = sched.last_column(ts);
      for_hosted(rank, team.size(), nw, [&](std::size_t w) {
        sched.columns().for_each(w, lo, hi, [&](std::size_t j) {
          const std::size_t i = ts - j;
          double v;
          if (i == 0 || j == 0) {
            v = kernel.boundary(i, j);
          } else {
            v = kernel.cell(i, j, buf.read(older, j - 1, ts), buf.read(newer, j, ts), buf.read(newer, j - 1, ts));
          }
          buf.write(out, j, ts, v);
        });
      });
      team.sync();
    }
  });
  return buf.value(WavefrontSchedule::write_row(n_ts - 1), sched.cols());
}

template <class Buffer>
double run_wavefront(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg,
                     WorkerTeam& team, Buffer& buf) {
  const WavefrontSchedule sched(a.size(), b.size(), cfg.workers_per_pair, cfg.assignment);
  return detail::with_dp_kernel(spec, a, b, [&](const auto& k) { return wavefront(k, sched, team, buf); });
}

}  // namespace

void ParallelConfig::validate() const {
  if (workers_per_pair < 1) throw ParameterError("workers_per_pair (n_c) must be >= 1");
  if (batch_workers < 1) throw ParameterError("batch_workers must be >= 1");
}

std::size_t ParallelConfig::pair_threads() const {
  const std::size_t cap = max_threads == 0 ? default_worker_count() : max_threads;
  return std::max<std::size_t>(1, std::min(workers_per_pair, cap));
}

Partition::Partition(std::size_t items, std::size_t workers, Assignment mode)
    : items_(items), workers_(std::max<std::size_t>(1, workers)), mode_(mode), chunk_((items + workers_ - 1) / workers_) {
  if (chunk_ == 0) chunk_ = 1;
}

std::size_t Partition::owner(std::size_t item) const noexcept {
  return mode_ == Assignment::kContiguous ? item / chunk_ : item % workers_;
}

WavefrontSchedule::WavefrontSchedule(std::size_t n, std::size_t m, std::size_t workers, Assignment mode)
    : n_(n), m_(m), columns_(m + 1, workers, mode) {}

InstrumentedScoreBuffer::InstrumentedScoreBuffer(std::size_t cols)
    : cols_(cols), values_(3 * cols, 0.0), written_at_(new std::atomic<long>[3 * cols]) {
  for (std::size_t k = 0; k < 3 * cols; ++k) written_at_[k].store(-1);
}

double InstrumentedScoreBuffer::read(std::size_t row, std::size_t col, std::size_t slot) const {
  reads_.fetch_add(1, std::memory_order_relaxed);
  const long written = written_at_[row * cols_ + col].load(std::memory_order_relaxed);
  const long ts = static_cast<long>(slot);
  if (written == ts) {
    same_slot_.fetch_add(1, std::memory_order_relaxed);
  } else {
    // The diagonal held by `row` at this point of the rotation.
    std::optional<long> expected;
    for (long back : {1L, 2L}) {
      if (ts - back >= 0 && WavefrontSchedule::write_row(static_cast<std::size_t>(ts - back)) == row) {
        expected = ts - back;
      }
    }
    if (!expected || written != *expected) stale_.fetch_add(1, std::memory_order_relaxed);
  }
  return values_[row * cols_ + col];
}

void InstrumentedScoreBuffer::write(std::size_t row, std::size_t col, std::size_t slot, double v) {
  writes_.fetch_add(1, std::memory_order_relaxed);
  values_[row * cols_ + col] = v;
  written_at_[row * cols_ + col].store(static_cast<long>(slot), std::memory_order_relaxed);
}

double par_scan(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg,
                WorkerTeam& team) {
  require_class(spec, MeasureClass::kLinearScan, "par_scan");
  cfg.validate();
  validate_inputs(spec, a, b);
  switch (spec.kind) {
    case MeasureKind::kSpd:
      return scan_spd(a, b, cfg, team);
    case MeasureKind::kCdds:
      return scan_cdds(a, b, *spec.params.eps_spatial, cfg, team);
    default:
      return scan_sar(a, b, spec.params, cfg, team);
  }
}

double par_scan(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg) {
  cfg.validate();
  WorkerTeam team(cfg.pair_threads());
  return par_scan(spec, a, b, cfg, team);
}

double par_dp(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg,
              WorkerTeam& team) {
  require_class(spec, MeasureClass::kDynamicProgramming, "par_dp");
  cfg.validate();
  validate_inputs(spec, a, b);
  ScoreBuffer buf(b.size() + 1);
  return run_wavefront(spec, a, b, cfg, team, buf);
}

double par_dp(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg) {
  cfg.validate();
  WorkerTeam team(cfg.pair_threads());
  return par_dp(spec, a, b, cfg, team);
}

double par_dp_instrumented(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b,
                           const ParallelConfig& cfg, InstrumentedScoreBuffer& buffer) {
  require_class(spec, MeasureClass::kDynamicProgramming, "par_dp");
  cfg.validate();
  validate_inputs(spec, a, b);
  if (buffer.cols() != b.size() + 1) throw ParameterError("score buffer must have |b|+1 columns");
  WorkerTeam team(cfg.pair_threads());
  return run_wavefront(spec, a, b, cfg, team, buffer);
}

double par_enum(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg,
                WorkerTeam& team) {
  require_class(spec, MeasureClass::kEnumeration, "par_enum");
  cfg.validate();
  validate_inputs(spec, a, b);
  const std::size_t nw = cfg.workers_per_pair;
  const std::size_t n = a.size();
  const Partition part(b.size(), nw, cfg.assignment);
  // Workers own columns of b: they finish those column minima and keep
  // partial row minima over their columns only.
  std::vector<double> col_min(b.size(), detail::kInf);
  std::vector<double> row_partial(nw * n, detail::kInf);
  team.run([&](std::size_t rank) {
    for_hosted(rank, team.size(), nw, [&](std::size_t w) {
      double* rows = row_partial.data() + w * n;
      part.for_each(w, [&](std::size_t j) {
        double cmin = detail::kInf;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = distance(a[i], b[j]);
          cmin = std::min(cmin, d);
          rows[i] = std::min(rows[i], d);
        }
        col_min[j] = cmin;
      });
    });
  });
  std::vector<double> row_min(n, detail::kInf);
  for (std::size_t w = 0; w < nw; ++w) {
    for (std::size_t i = 0; i < n; ++i) row_min[i] = std::min(row_min[i], row_partial[w * n + i]);
  }
  return spec.kind == MeasureKind::kHausdorff ? detail::hausdorff_from_mins(row_min, col_min)
                                               : detail::owd_from_mins(row_min, col_min);
}

double par_enum(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg) {
  cfg.validate();
  WorkerTeam team(cfg.pair_threads());
  return par_enum(spec, a, b, cfg, team);
}

double par_evaluate(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg,
                    WorkerTeam& team) {
  switch (measure_class(spec.kind)) {
    case MeasureClass::kLinearScan:
      return par_scan(spec, a, b, cfg, team);
    case MeasureClass::kDynamicProgramming:
      return par_dp(spec, a, b, cfg, team);
    default:
      return par_enum(spec, a, b, cfg, team);
  }
}

double par_evaluate(const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, const ParallelConfig& cfg) {
  cfg.validate();
  WorkerTeam team(cfg.pair_threads());
  return par_evaluate(spec, a, b, cfg, team);
}

BatchResult run_batch(const MeasureSpec& spec, std::span<const TrajectoryPair> pairs, const ParallelConfig& cfg,
                      BatchMode mode) {
  Stopwatch total;
  if (pairs.empty()) throw ParameterError("run_batch requires at least one pair");
  cfg.validate();
  validate_params(spec);

  BatchResult result;
  Stopwatch phase;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    try {
      validate_inputs(spec, pairs[k].first.get(), pairs[k].second.get());
    } catch (const Error& e) {
      throw BatchError(k, e.what());
    }
  }
  result.scores.assign(pairs.size(), 0.0);
  result.timing.pre_s = phase.lap();

  if (mode == BatchMode::kIntraPair) {
    WorkerTeam team(cfg.pair_threads());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      try {
        result.scores[k] = par_evaluate(spec, pairs[k].first.get(), pairs[k].second.get(), cfg, team);
      } catch (const Error& e) {
        throw BatchError(k, e.what());
      }
    }
  } else {
    WorkerTeam team(cfg.batch_workers);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    std::optional<std::size_t> failed_at;
    std::string failure;
    team.run([&](std::size_t) {
      for (std::size_t k = next.fetch_add(1); k < pairs.size() && !failed.load(); k = next.fetch_add(1)) {
        try {
          result.scores[k] = detail::evaluate_unchecked(spec, pairs[k].first.get(), pairs[k].second.get());
        } catch (const std::exception& e) {
          std::lock_guard lock(err_mu);
          if (!failed_at || k < *failed_at) {
            failed_at = k;
            failure = e.what();
          }
          failed.store(true);
        }
      }
    });
    if (failed_at) throw BatchError(*failed_at, failure);
  }
  result.timing.cmp_s = phase.lap();
  result.timing.total_s = total.seconds();
  return result;
}

}  // namespace trajsim
