#include "trajsim/worker_team.hpp"

#include <cstdlib>
#include <string>

namespace trajsim {

WorkerTeam::WorkerTeam(std::size_t size) : size_(size == 0 ? 1 : size), barrier_(static_cast<std::ptrdiff_t>(size_)) {
  threads_.reserve(size_ - 1);
  for (std::size_t r = 1; r < size_; ++r) threads_.emplace_back([this, r] { member_loop(r); });
}

WorkerTeam::~WorkerTeam() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerTeam::member_loop(std::size_t rank) {
  std::uint64_t seen = 0;
  while (true) {
    const std::function<void(std::size_t)>* job = nullptr;
    {
      std::unique_lock lock(mu_);
      start_cv_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) return;
      seen = generation_;
      job = job_;
    }
    try {
      (*job)(rank);
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!error_) error_ = std::current_exception();
    }
    {
      std::lock_guard lock(mu_);
      if (--running_ == 0) done_cv_.notify_one();
    }
  }
}

void WorkerTeam::run(const std::function<void(std::size_t)>& job) {
  if (size_ == 1) {
    job(0);
    return;
  }
  {
    std::lock_guard lock(mu_);
    job_ = &job;
    error_ = nullptr;
    running_ = size_ - 1;
    ++generation_;
  }
  start_cv_.notify_all();
  std::exception_ptr own;
  try {
    job(0);
  } catch (...) {
    own = std::current_exception();
  }
  std::exception_ptr err;
  {
    std::unique_lock lock(mu_);
    done_cv_.wait(lock, [&] { return running_ == 0; });
    job_ = nullptr;
    err = own ? own : error_;
  }
  if (err) std::rethrow_exception(err);
}

void WorkerTeam::sync() {
  if (size_ > 1) barrier_.arrive_and_wait();
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("TRAJSIM_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace trajsim
