#include "trajsim/trajectory.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "trajsim/errors.hpp"

namespace trajsim {

namespace {

void validate_points(const std::string& id, const std::vector<Point>& points) {
  if (points.empty()) return;
  const bool timed = points.front().t.has_value();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ValidationError("trajectory '" + id + "': non-finite coordinate at point " + std::to_string(i));
    }
    if (p.t.has_value() != timed) {
      throw ValidationError("trajectory '" + id + "': mixes timestamped and untimestamped points");
    }
    if (timed) {
      if (!std::isfinite(*p.t) || *p.t < 0.0) {
        throw ValidationError("trajectory '" + id + "': invalid timestamp at point " + std::to_string(i));
      }
      if (i > 0 && *p.t < *points[i - 1].t) {
        throw ValidationError("trajectory '" + id + "': timestamps decrease at point " + std::to_string(i));
      }
    }
  }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

constexpr std::string_view kHeader = "traj_id,x,y,t";

}  // namespace

Trajectory::Trajectory(std::string id, std::vector<Point> points) : id_(std::move(id)), points_(std::move(points)) {
  validate_points(id_, points_);
}

double Trajectory::duration() const noexcept {
  if (!timestamped()) return 0.0;
  return *points_.back().t - *points_.front().t;
}

Dataset::Dataset(std::vector<Trajectory> trajectories, std::string source)
    : trajectories_(std::move(trajectories)), source_(std::move(source)) {
  index_.reserve(trajectories_.size());
  for (std::size_t i = 0; i < trajectories_.size(); ++i) {
    if (!index_.emplace(trajectories_[i].id(), i).second) {
      throw ValidationError("duplicate trajectory id '" + trajectories_[i].id() + "'");
    }
  }
}

std::size_t Dataset::point_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : trajectories_) n += t.size();
  return n;
}

std::optional<std::size_t> Dataset::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError("invalid number '" + std::string(s) + "'", 0);
  }
  return v;
}

Dataset parse_csv(std::string_view text, std::string source) {
  std::vector<Trajectory> out;
  std::unordered_map<std::string, std::size_t> seen;
  std::string current_id;
  std::vector<Point> current;
  bool have_current = false;

  auto flush = [&] {
    if (!have_current) return;
    seen.emplace(current_id, out.size());
    out.emplace_back(current_id, std::move(current));
    current = {};
    have_current = false;
  };

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1 && line == kHeader) continue;

    const auto fields = split(line, ',');
    if (fields.size() != 3 && fields.size() != 4) {
      throw ParseError("expected 4 fields (traj_id,x,y,t), got " + std::to_string(fields.size()), line_no);
    }
    if (fields[0].empty()) throw ParseError("empty traj_id", line_no);

    Point p;
    try {
      p.x = parse_double(fields[1]);
      p.y = parse_double(fields[2]);
      if (fields.size() == 4 && !fields[3].empty()) p.t = parse_double(fields[3]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || (p.t && (!std::isfinite(*p.t) || *p.t < 0.0))) {
      throw ValidationError("line " + std::to_string(line_no) + ": coordinates must be finite and t >= 0");
    }

    const std::string id(fields[0]);
    if (!have_current || id != current_id) {
      flush();
      if (seen.count(id)) {
        throw ValidationError("line " + std::to_string(line_no) + ": rows of trajectory '" + id +
                              "' are not contiguous");
      }
      current_id = id;
      have_current = true;
    } else {
      const Point& prev = current.back();
      if (prev.t.has_value() != p.t.has_value()) {
        throw ValidationError("line " + std::to_string(line_no) + ": trajectory '" + id +
                              "' mixes timestamped and untimestamped points");
      }
      if (p.t && *p.t < *prev.t) {
        throw ValidationError("line " + std::to_string(line_no) + ": trajectory '" + id +
                              "' has decreasing timestamps");
      }
    }
    current.push_back(p);
  }
  flush();
  return Dataset(std::move(out), std::move(source));
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path);
}

std::string format_csv(const Dataset& ds) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& traj : ds.trajectories()) {
    for (const auto& p : traj.points()) {
      out += traj.id();
      out += ',';
      out += format_double(p.x);
      out += ',';
      out += format_double(p.y);
      out += ',';
      if (p.t) out += format_double(*p.t);
      out += '\n';
    }
  }
  return out;
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << format_csv(ds);
}

Dataset filter_by_length(const Dataset& ds, std::size_t min_n, std::size_t max_n) {
  if (min_n < 1 || min_n > max_n) throw ParameterError("filter_by_length requires 1 <= min_n <= max_n");
  std::vector<Trajectory> kept;
  for (const auto& t : ds.trajectories()) {
    if (t.size() >= min_n && t.size() <= max_n) kept.push_back(t);
  }
  return Dataset(std::move(kept), ds.source());
}

Dataset generate_synthetic(std::size_t count, std::size_t min_n, std::size_t max_n, std::uint64_t seed,
                           bool timestamped) {
  if (min_n < 1 || min_n > max_n) throw ParameterError("generate_synthetic requires 1 <= min_n <= max_n");
  constexpr double kExtent = 10000.0;
  constexpr double kMaxStep = 50.0;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> length(min_n, max_n);
  std::uniform_real_distribution<double> start(0.0, kExtent);
  std::uniform_real_distribution<double> step(-kMaxStep, kMaxStep);
  std::uniform_real_distribution<double> dt(1.0, 30.0);

  auto reflect = [](double v) {
    if (v < 0.0) return -v;
    if (v > kExtent) return 2.0 * kExtent - v;
    return v;
  };

  std::vector<Trajectory> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = length(rng);
    std::vector<Point> pts;
    pts.reserve(n);
    Point p{start(rng), start(rng), std::nullopt};
    double t = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) {
        p.x = reflect(p.x + step(rng));
        p.y = reflect(p.y + step(rng));
        if (timestamped) t += dt(rng);
      }
      if (timestamped) p.t = t;
      pts.push_back(p);
    }
    out.emplace_back(std::to_string(i), std::move(pts));
  }
  return Dataset(std::move(out), "synthetic(count=" + std::to_string(count) + ",n=" + std::to_string(min_n) + ".." +
                                     std::to_string(max_n) + ",seed=" + std::to_string(seed) +
                                     (timestamped ? ",timestamped)" : ")"));
}

std::vector<std::pair<std::size_t, std::size_t>> sample_pair_indices(const Dataset& ds, std::size_t n_pairs,
                                                                     std::uint64_t seed) {
  if (ds.empty()) throw ParameterError("cannot sample pairs from an empty dataset");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, ds.size() - 1);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const std::size_t a = pick(rng);
    const std::size_t b = pick(rng);
    out.emplace_back(a, b);
  }
  return out;
}

std::vector<TrajectoryPair> sample_pairs(const Dataset& ds, std::size_t n_pairs, std::uint64_t seed) {
  std::vector<TrajectoryPair> out;
  out.reserve(n_pairs);
  for (auto [a, b] : sample_pair_indices(ds, n_pairs, seed)) out.emplace_back(std::cref(ds[a]), std::cref(ds[b]));
  return out;
}

}  // namespace trajsim
