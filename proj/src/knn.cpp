#include <algorithm>
#include <unordered_set>

#include "trajsim/analytics.hpp"
#include "trajsim/errors.hpp"

namespace trajsim {

KnnResult rank_scores(const std::string& query_id, std::span<const Ranked> scored, std::size_t k, MeasureKind kind) {
  std::vector<Ranked> v(scored.begin(), scored.end());
  const bool desc = larger_is_more_similar(kind);
  const auto better = [desc](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return desc ? a.score > b.score : a.score < b.score;
    return a.id < b.id;
  };
  const std::size_t take = std::min(k, v.size());
  std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(take), v.end(), better);
  v.resize(take);
  return {query_id, k, std::move(v)};
}

KnnResult knn_exact(const Dataset& D, const Trajectory& q, std::size_t k, const MeasureSpec& spec,
                    const ParallelConfig& cfg, BatchMode mode) {
  if (k == 0 || k > D.size()) {
    throw ParameterError("k must be in [1, " + std::to_string(D.size()) + "], got " + std::to_string(k));
  }
  std::vector<TrajectoryPair> pairs;
  pairs.reserve(D.size());
  for (const auto& t : D.trajectories()) pairs.emplace_back(std::cref(q), std::cref(t));
  const BatchResult r = run_batch(spec, pairs, cfg, mode);
  std::vector<Ranked> scored;
  scored.reserve(D.size());
  for (std::size_t i = 0; i < D.size(); ++i) scored.push_back({D[i].id(), r.scores[i]});
  return rank_scores(q.id(), scored, k, spec.kind);
}

KnnResult to_knn_result(const std::string& query_id, std::size_t k, const std::vector<Neighbor>& neighbors) {
  KnnResult out{query_id, k, {}};
  out.neighbors.reserve(neighbors.size());
  for (const auto& n : neighbors) out.neighbors.push_back({n.id, n.distance});
  return out;
}

namespace {

template <class Search>
EmbeddingKnn embed_and_search(const FfnWeights& w, std::size_t index_dim, const Trajectory& q, std::size_t k,
                              Search search) {
  if (w.d != index_dim) {
    throw ValidationError("encoder dimension " + std::to_string(w.d) + " does not match index dimension " +
                          std::to_string(index_dim));
  }
  EmbeddingKnn out;
  Stopwatch sw;
  const Embedding e = ffn_encode(q, w);
  out.timing.emb_s = sw.lap();
  out.result = to_knn_result(q.id(), k, search(e.vec));
  out.timing.cmp_s = sw.lap();
  out.timing.total_s = sw.seconds();
  return out;
}

}  // namespace

EmbeddingKnn knn_embedding(const FlatIndex& idx, const FfnWeights& w, const Trajectory& q, std::size_t k) {
  return embed_and_search(w, idx.dim(), q, k, [&](std::span<const double> v) { return knn_flat(idx, v, k); });
}

EmbeddingKnn knn_embedding(const IvfIndex& idx, const FfnWeights& w, const Trajectory& q, std::size_t k,
                           std::optional<std::size_t> nprobe) {
  const std::size_t np = nprobe.value_or(idx.nprobe_default());
  return embed_and_search(w, idx.dim(), q, k, [&](std::span<const double> v) { return knn_ivf(idx, v, k, np); });
}

double hit_ratio(const KnnResult& approx, const KnnResult& truth) {
  if (approx.k != truth.k) {
    throw ParameterError("hit ratio needs equal k, got " + std::to_string(approx.k) + " and " +
                         std::to_string(truth.k));
  }
  if (approx.query_id != truth.query_id) throw ParameterError("hit ratio needs results for the same query");
  if (approx.k == 0) throw ParameterError("hit ratio needs k >= 1");
  std::unordered_set<std::string> ids;
  for (const auto& n : truth.neighbors) ids.insert(n.id);
  std::size_t hits = 0;
  for (const auto& n : approx.neighbors) hits += ids.count(n.id);
  return static_cast<double>(hits) / static_cast<double>(approx.k);
}

std::string format_knn(std::span<const KnnResult> results) {
  std::string out = "query_id,rank,id,score\n";
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.neighbors.size(); ++i) {
      out += r.query_id + "," + std::to_string(i + 1) + "," + r.neighbors[i].id + "," +
             format_double(r.neighbors[i].score) + "\n";
    }
  }
  return out;
}

}  // namespace trajsim
