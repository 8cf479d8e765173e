#include "trajsim/vector_index.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "trajsim/errors.hpp"
#include "trajsim/worker_team.hpp"

namespace trajsim {

namespace {

double squared_l2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

void check_query(std::span<const double> q, std::size_t d, std::size_t k, std::size_t n) {
  if (q.size() != d) {
    throw ValidationError("query dimension " + std::to_string(q.size()) + " does not match index dimension " +
                          std::to_string(d));
  }
  if (k == 0 || k > n) {
    throw ParameterError("k must be in [1, " + std::to_string(n) + "], got " + std::to_string(k));
  }
}

// Nearest centroid under L2; ties go to the lowest index.
std::size_t nearest_centroid(std::span<const double> v, const std::vector<double>& centroids, std::size_t nlist) {
  const std::size_t d = v.size();
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < nlist; ++c) {
    const double dist = squared_l2(v, {centroids.data() + c * d, d});
    if (dist < best_d) {
      best_d = dist;
      best = c;
    }
  }
  return best;
}

std::vector<double> kmeans_pp(const VectorTable& t, std::size_t nlist, std::mt19937_64& rng) {
  const std::size_t n = t.size(), d = t.dim();
  std::vector<double> centroids;
  centroids.reserve(nlist * d);
  std::vector<bool> chosen(n, false);
  auto take = [&](std::size_t r) {
    chosen[r] = true;
    auto row = t.row(r);
    centroids.insert(centroids.end(), row.begin(), row.end());
  };
  take(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));

  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < nlist; ++c) {
    std::span<const double> last{centroids.data() + (c - 1) * d, d};
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      d2[r] = std::min(d2[r], squared_l2(t.row(r), last));
      total += d2[r];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
      double acc = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        if (d2[r] <= 0.0) continue;
        acc += d2[r];
        pick = r;
        if (acc > target) break;
      }
    }
    if (pick == n) {
      // Every point coincides with a centroid: fall back to an unused row.
      std::vector<std::size_t> unused;
      for (std::size_t r = 0; r < n; ++r) {
        if (!chosen[r]) unused.push_back(r);
      }
      pick = unused[std::uniform_int_distribution<std::size_t>(0, unused.size() - 1)(rng)];
    }
    take(pick);
  }
  return centroids;
}

void lloyd(const VectorTable& t, std::vector<double>& centroids, std::size_t nlist, std::size_t iters) {
  const std::size_t n = t.size(), d = t.dim();
  std::vector<std::size_t> assign(n);
  std::vector<double> sums(nlist * d);
  std::vector<std::size_t> counts(nlist);
  for (std::size_t it = 0; it < iters; ++it) {
    for (std::size_t r = 0; r < n; ++r) assign[r] = nearest_centroid(t.row(r), centroids, nlist);
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t r = 0; r < n; ++r) {
      auto row = t.row(r);
      double* s = sums.data() + assign[r] * d;
      for (std::size_t k = 0; k < d; ++k) s[k] += row[k];
      ++counts[assign[r]];
    }
    double movement = 0.0;
    for (std::size_t c = 0; c < nlist; ++c) {
      if (counts[c] == 0) continue;  // stranded centroid stays put
      double* cen = centroids.data() + c * d;
      double moved = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double v = sums[c * d + k] / static_cast<double>(counts[c]);
        moved += (v - cen[k]) * (v - cen[k]);
        cen[k] = v;
      }
      movement = std::max(movement, std::sqrt(moved));
    }
    if (movement < 1e-9) break;
  }
}

template <class Query>
std::vector<std::vector<Neighbor>> fan_out(const EmbeddingStore& queries, std::size_t workers, Query query) {
  std::vector<std::vector<Neighbor>> out(queries.size());
  if (queries.empty()) return out;
  WorkerTeam team(std::max<std::size_t>(1, std::min(workers, queries.size())));
  std::atomic<std::size_t> next{0};
  team.run([&](std::size_t) {
    for (std::size_t i = next.fetch_add(1); i < queries.size(); i = next.fetch_add(1)) out[i] = query(queries[i].vec);
  });
  return out;
}

}  // namespace

std::string metric_name(Metric m) { return m == Metric::kL1 ? "l1" : "l2"; }

Metric parse_metric(std::string_view name) {
  if (name == "l1" || name == "L1") return Metric::kL1;
  if (name == "l2" || name == "L2") return Metric::kL2;
  throw ParameterError("unknown metric '" + std::string(name) + "'");
}

double metric_distance(Metric m, std::span<const double> a, std::span<const double> b) {
  return m == Metric::kL1 ? l1_distance(a, b) : l2_distance(a, b);
}

VectorTable::VectorTable(const EmbeddingStore& store) : d_(store.dim()) {
  ids_.reserve(store.size());
  data_.reserve(store.size() * d_);
  for (const auto& e : store.entries()) {
    ids_.push_back(e.id);
    data_.insert(data_.end(), e.vec.begin(), e.vec.end());
  }
}

EmbeddingStore VectorTable::to_store() const {
  EmbeddingStore s(d_);
  for (std::size_t r = 0; r < size(); ++r) {
    auto v = row(r);
    s.add({ids_[r], {v.begin(), v.end()}});
  }
  return s;
}

std::vector<Neighbor> VectorTable::rank(std::span<const std::size_t> rows, std::span<const double> q, std::size_t k,
                                        Metric metric) const {
  std::vector<std::pair<double, std::size_t>> cand;
  cand.reserve(rows.size());
  for (std::size_t r : rows) cand.emplace_back(metric_distance(metric, row(r), q), r);
  const auto less = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return ids_[a.second] < ids_[b.second];
  };
  const std::size_t take = std::min(k, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end(), less);
  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({ids_[cand[i].second], cand[i].first});
  return out;
}

FlatIndex::FlatIndex(const EmbeddingStore& store, Metric metric) : metric_(metric), table_(store) {
  if (store.empty()) throw ParameterError("cannot build an index over an empty store");
}

std::size_t default_nlist(std::size_t n) {
  const auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  return std::clamp<std::size_t>(r, 1, std::max<std::size_t>(n, 1));
}

std::size_t default_nprobe(std::size_t nlist) { return std::max<std::size_t>(1, nlist / 10); }

IvfIndex::IvfIndex(const EmbeddingStore& store, Metric metric, IvfParams params)
    : metric_(metric), params_(params), table_(store) {
  check_params();
  std::mt19937_64 rng(params_.seed);
  centroids_ = kmeans_pp(table_, params_.nlist, rng);
  lloyd(table_, centroids_, params_.nlist, params_.kmeans_iters);
  assign_lists();
}

IvfIndex::IvfIndex(const EmbeddingStore& store, Metric metric, IvfParams params, std::vector<double> centroids)
    : metric_(metric), params_(params), table_(store), centroids_(std::move(centroids)) {
  check_params();
  if (centroids_.size() != params_.nlist * dim()) throw ValidationError("centroid table does not match nlist x d");
  assign_lists();
}

void IvfIndex::check_params() {
  const std::size_t n = table_.size();
  if (n == 0) throw ParameterError("cannot build an index over an empty store");
  if (params_.nlist == 0) params_.nlist = default_nlist(n);
  if (params_.nlist > n) {
    throw ParameterError("nlist " + std::to_string(params_.nlist) + " exceeds store size " + std::to_string(n));
  }
  if (params_.nprobe_default == 0) params_.nprobe_default = default_nprobe(params_.nlist);
  if (params_.nprobe_default > params_.nlist) throw ParameterError("nprobe_default exceeds nlist");
}

void IvfIndex::assign_lists() {
  lists_.assign(params_.nlist, {});
  for (std::size_t r = 0; r < table_.size(); ++r) {
    lists_[nearest_centroid(table_.row(r), centroids_, params_.nlist)].push_back(r);
  }
}

std::vector<std::size_t> IvfIndex::probe_order(std::span<const double> q, std::size_t nprobe) const {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(nlist());
  for (std::size_t c = 0; c < nlist(); ++c) dist.emplace_back(squared_l2(q, centroid(c)), c);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(nprobe), dist.end());
  std::vector<std::size_t> out;
  out.reserve(nprobe);
  for (std::size_t i = 0; i < nprobe; ++i) out.push_back(dist[i].second);
  return out;
}

FlatIndex build_flat(const EmbeddingStore& store, Metric metric) { return FlatIndex(store, metric); }

IvfIndex build_ivf(const EmbeddingStore& store, Metric metric, std::size_t nlist, std::size_t kmeans_iters,
                   std::uint64_t seed) {
  return IvfIndex(store, metric, IvfParams{nlist, 0, kmeans_iters, seed});
}

std::vector<Neighbor> knn_flat(const FlatIndex& idx, std::span<const double> q, std::size_t k) {
  check_query(q, idx.dim(), k, idx.size());
  std::vector<std::size_t> rows(idx.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return idx.table().rank(rows, q, k, idx.metric());
}

std::vector<Neighbor> knn_ivf(const IvfIndex& idx, std::span<const double> q, std::size_t k, std::size_t nprobe) {
  check_query(q, idx.dim(), k, idx.size());
  if (nprobe == 0 || nprobe > idx.nlist()) {
    throw ParameterError("nprobe must be in [1, " + std::to_string(idx.nlist()) + "], got " + std::to_string(nprobe));
  }
  std::vector<std::size_t> rows;
  for (std::size_t c : idx.probe_order(q, nprobe)) {
    const auto& l = idx.list(c);
    rows.insert(rows.end(), l.begin(), l.end());
  }
  return idx.table().rank(rows, q, k, idx.metric());
}

std::vector<std::vector<Neighbor>> knn_flat_batch(const FlatIndex& idx, const EmbeddingStore& queries,
                                                  std::size_t k, std::size_t workers) {
  return fan_out(queries, workers, [&](std::span<const double> q) { return knn_flat(idx, q, k); });
}

std::vector<std::vector<Neighbor>> knn_ivf_batch(const IvfIndex& idx, const EmbeddingStore& queries,
                                                 std::size_t k, std::size_t nprobe, std::size_t workers) {
  return fan_out(queries, workers, [&](std::span<const double> q) { return knn_ivf(idx, q, k, nprobe); });
}

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_meta(const std::string& dir, const json& meta, const VectorTable& table) {
  fs::create_directories(dir);
  save_store(table.to_store(), (fs::path(dir) / "embeddings.csv").string());
  write_file((fs::path(dir) / "index.json").string(), meta.dump(2) + "\n");
}

}  // namespace

void save_index(const FlatIndex& idx, const std::string& dir) {
  json meta = {{"format", "trajsim-index"}, {"kind", "flat"}, {"metric", metric_name(idx.metric())},
               {"d", idx.dim()},            {"count", idx.size()}};
  write_meta(dir, meta, idx.table());
}

void save_index(const IvfIndex& idx, const std::string& dir) {
  json meta = {{"format", "trajsim-index"},
               {"kind", "ivf"},
               {"metric", metric_name(idx.metric())},
               {"d", idx.dim()},
               {"count", idx.size()},
               {"nlist", idx.nlist()},
               {"nprobe_default", idx.nprobe_default()},
               {"kmeans_iters", idx.params().kmeans_iters},
               {"seed", idx.params().seed}};
  write_meta(dir, meta, idx.table());
  EmbeddingStore cents(idx.dim());
  for (std::size_t c = 0; c < idx.nlist(); ++c) {
    auto v = idx.centroid(c);
    cents.add({std::to_string(c), {v.begin(), v.end()}});
  }
  std::string text = format_store(cents);
  text.replace(0, 2, "centroid");
  write_file((fs::path(dir) / "centroids.csv").string(), text);
}

AnyIndex load_index(const std::string& dir) {
  json meta;
  try {
    meta = json::parse(read_file((fs::path(dir) / "index.json").string()));
  } catch (const json::exception& e) {
    throw ParseError(std::string("index metadata: ") + e.what(), 0);
  }
  try {
    if (meta.value("format", "") != "trajsim-index") throw ValidationError("not a trajsim index directory: " + dir);
    EmbeddingStore store = load_store((fs::path(dir) / "embeddings.csv").string());
    if (store.dim() != meta.at("d").get<std::size_t>() || store.size() != meta.at("count").get<std::size_t>()) {
      throw ValidationError("index embeddings do not match metadata");
    }
    const Metric metric = parse_metric(meta.at("metric").get<std::string>());
    const std::string kind = meta.at("kind").get<std::string>();
    if (kind == "flat") return FlatIndex(store, metric);
    if (kind != "ivf") throw ValidationError("unknown index kind '" + kind + "'");

    std::string text = read_file((fs::path(dir) / "centroids.csv").string());
    if (text.rfind("centroid", 0) != 0) throw ParseError("centroids.csv must start with 'centroid'", 1);
    text.replace(0, 8, "id");
    EmbeddingStore cents = parse_store(text);
    if (cents.dim() != store.dim()) throw ValidationError("centroid dimension does not match embeddings");
    std::vector<double> flat;
    for (const auto& e : cents.entries()) flat.insert(flat.end(), e.vec.begin(), e.vec.end());
    IvfParams p{meta.at("nlist").get<std::size_t>(), meta.at("nprobe_default").get<std::size_t>(),
                meta.at("kmeans_iters").get<std::size_t>(), meta.at("seed").get<std::uint64_t>()};
    return IvfIndex(store, metric, p, std::move(flat));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("index metadata: ") + e.what());
  }
}

}  // namespace trajsim
