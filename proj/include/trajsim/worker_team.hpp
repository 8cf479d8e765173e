#pragma once

#include <barrier>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace trajsim {

/// A fixed group of threads executing one job at a time in fork-join style.
/// Rank 0 is the thread calling run(); ranks 1..size-1 are owned threads.
/// Members may rendezvous inside a job with sync().
class WorkerTeam {
 public:
  explicit WorkerTeam(std::size_t size);
  ~WorkerTeam();
  WorkerTeam(const WorkerTeam&) = delete;
  WorkerTeam& operator=(const WorkerTeam&) = delete;

  std::size_t size() const noexcept { return size_; }

  /// Runs job(rank) on every member and returns when all have finished.
  /// The first exception thrown by any member is rethrown here. A job that
  /// calls sync() must not throw before its last sync().
  void run(const std::function<void(std::size_t)>& job);

  /// Barrier across all members; call only from inside a job.
  void sync();

 private:
  void member_loop(std::size_t rank);

  std::size_t size_;
  std::barrier<> barrier_;
  std::mutex mu_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::uint64_t generation_ = 0;
  std::size_t running_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
  std::vector<std::thread> threads_;
};

/// Worker count from TRAJSIM_WORKERS, else hardware concurrency (at least 1).
std::size_t default_worker_count();

}  // namespace trajsim
