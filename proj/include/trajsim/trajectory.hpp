#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace trajsim {

/// Planar point, optionally timestamped (seconds).
struct Point {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> t;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Immutable ordered sequence of points.
///
/// Points are either all timestamped or all untimestamped; timestamps are
/// finite, non-negative and non-decreasing. An empty point list is accepted
/// because the edit-style measures define a value for it, but loaders and
/// generators only ever produce trajectories with at least one point.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::string id, std::vector<Point> points);

  const std::string& id() const noexcept { return id_; }
  std::span<const Point> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  bool timestamped() const noexcept { return !points_.empty() && points_.front().t.has_value(); }
  const Point& operator[](std::size_t i) const noexcept { return points_[i]; }

  /// t_last - t_first; 0 for untimestamped or single-point trajectories.
  double duration() const noexcept;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::string id_;
  std::vector<Point> points_;
};

using TrajectoryPair = std::pair<std::reference_wrapper<const Trajectory>, std::reference_wrapper<const Trajectory>>;

/// Collection of trajectories with unique ids.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<Trajectory> trajectories, std::string source = {});

  std::span<const Trajectory> trajectories() const noexcept { return trajectories_; }
  std::size_t size() const noexcept { return trajectories_.size(); }
  bool empty() const noexcept { return trajectories_.empty(); }
  const Trajectory& operator[](std::size_t i) const noexcept { return trajectories_[i]; }
  const std::string& source() const noexcept { return source_; }
  std::size_t point_count() const noexcept;

  /// Index of the trajectory with `id`, if present.
  std::optional<std::size_t> find(const std::string& id) const;

  friend bool operator==(const Dataset& a, const Dataset& b) { return a.trajectories_ == b.trajectories_; }

 private:
  std::vector<Trajectory> trajectories_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string source_;
};

/// Reads the `traj_id,x,y,t` CSV format. Throws ParseError (with line number)
/// or ValidationError.
Dataset load_csv(const std::string& path);
Dataset parse_csv(std::string_view text, std::string source = "inline");

void write_csv(const Dataset& ds, const std::string& path);
std::string format_csv(const Dataset& ds);

constexpr std::size_t kUnboundedLength = std::numeric_limits<std::size_t>::max();

/// Keeps trajectories with min_n <= size <= max_n, preserving order.
Dataset filter_by_length(const Dataset& ds, std::size_t min_n, std::size_t max_n = kUnboundedLength);

/// Seeded bounded random walks; trajectory i gets id "i".
Dataset generate_synthetic(std::size_t count, std::size_t min_n, std::size_t max_n, std::uint64_t seed,
                           bool timestamped);

/// Uniform sampling with replacement.
std::vector<std::pair<std::size_t, std::size_t>> sample_pair_indices(const Dataset& ds, std::size_t n_pairs,
                                                                     std::uint64_t seed);
std::vector<TrajectoryPair> sample_pairs(const Dataset& ds, std::size_t n_pairs, std::uint64_t seed);

/// Shortest round-trip decimal representation of `v`.
std::string format_double(double v);
double parse_double(std::string_view s);

}  // namespace trajsim
