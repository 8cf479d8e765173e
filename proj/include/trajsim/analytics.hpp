#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trajsim/embedding.hpp"
#include "trajsim/measures.hpp"
#include "trajsim/parallel.hpp"
#include "trajsim/timing.hpp"
#include "trajsim/vector_index.hpp"

namespace trajsim {

struct Ranked {
  std::string id;
  double score = 0.0;

  friend bool operator==(const Ranked&, const Ranked&) = default;
};

struct KnnResult {
  std::string query_id;
  std::size_t k = 0;
  /// Ascending for distances, descending for similarities; ties by ascending id.
  std::vector<Ranked> neighbors;

  friend bool operator==(const KnnResult&, const KnnResult&) = default;
};

/// Brute-force top-k of q against every trajectory of D, batched through run_batch.
KnnResult knn_exact(const Dataset& D, const Trajectory& q, std::size_t k, const MeasureSpec& spec,
                    const ParallelConfig& cfg, BatchMode mode = BatchMode::kPairPerWorker);

/// Sorts candidate scores into a KnnResult under the orientation of `kind`.
KnnResult rank_scores(const std::string& query_id, std::span<const Ranked> scored, std::size_t k, MeasureKind kind);

struct EmbeddingKnn {
  KnnResult result;
  TimingBreakdown timing;  // emb_s: query encoding, cmp_s: index scan
};

EmbeddingKnn knn_embedding(const FlatIndex& idx, const FfnWeights& w, const Trajectory& q, std::size_t k);
EmbeddingKnn knn_embedding(const IvfIndex& idx, const FfnWeights& w, const Trajectory& q, std::size_t k,
                           std::optional<std::size_t> nprobe = std::nullopt);

KnnResult to_knn_result(const std::string& query_id, std::size_t k, const std::vector<Neighbor>& neighbors);

/// |approx ids ∩ truth ids| / k.
double hit_ratio(const KnnResult& approx, const KnnResult& truth);

/// Dense symmetric n x n matrix.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), v_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return v_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double value) noexcept {
    v_[i * n_ + j] = value;
    v_[j * n_ + i] = value;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> v_;
};

/// m(i,j) = f(T_i, T_j) for i < j, mirrored; zero diagonal. A failing pair is
/// reported as BatchError naming (i,j).
DistanceMatrix precompute_distance_matrix(const Dataset& D, const MeasureSpec& spec, const ParallelConfig& cfg);
DistanceMatrix embedding_distance_matrix(const EmbeddingStore& store, Metric metric, std::size_t workers);

using DistanceFn = std::function<double(std::size_t, std::size_t)>;

struct Clustering {
  std::size_t k = 0;
  std::vector<std::string> item_ids;
  std::vector<std::size_t> medoids;  // item indices, one per cluster
  std::vector<std::string> medoid_ids;
  std::vector<std::size_t> assignment;  // cluster of each item
  double total_cost = 0.0;
  std::vector<double> cost_history;  // cost after each assignment step
  std::size_t iterations = 0;
  bool converged = false;

  friend bool operator==(const Clustering&, const Clustering&) = default;
};

/// Alternating k-medoids. Initial medoids are distinct and drawn with seeded
/// D^2 weighting; assignment ties go to the lowest cluster index, medoid ties
/// to the lowest id. Stops when the assignment repeats or after max_iters.
Clustering kmedoids(std::vector<std::string> items, const DistanceFn& dist, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters = 100, std::size_t workers = 1);
Clustering kmedoids(std::vector<std::string> items, const DistanceMatrix& m, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters = 100, std::size_t workers = 1);

/// Standard Rand Index: agreeing pairs / C(n,2); 1.0 when n < 2.
double rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);
double rand_index(const Clustering& a, const Clustering& b);
/// Share of pairs co-clustered in `truth` that are also co-clustered in `pred`.
double pair_recall(std::span<const std::size_t> truth, std::span<const std::size_t> pred);

// CSV outputs.
std::string format_distance_matrix(const DistanceMatrix& m);  // i,j,value for i < j
std::string format_clustering(const Clustering& c);            // id,cluster
std::string format_knn(std::span<const KnnResult> results);    // query_id,rank,id,score

}  // namespace trajsim
