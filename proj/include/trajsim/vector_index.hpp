#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "trajsim/embedding.hpp"

namespace trajsim {

enum class Metric { kL1, kL2 };

std::string metric_name(Metric m);
Metric parse_metric(std::string_view name);
double metric_distance(Metric m, std::span<const double> a, std::span<const double> b);

struct Neighbor {
  std::string id;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Row-major copy of an embedding store.
class VectorTable {
 public:
  VectorTable() = default;
  explicit VectorTable(const EmbeddingStore& store);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return d_; }
  const std::string& id(std::size_t row) const noexcept { return ids_[row]; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * d_, d_}; }
  EmbeddingStore to_store() const;

  /// The k best of `rows` by (distance, id).
  std::vector<Neighbor> rank(std::span<const std::size_t> rows, std::span<const double> q, std::size_t k,
                             Metric metric) const;

 private:
  std::size_t d_ = 0;
  std::vector<std::string> ids_;
  std::vector<double> data_;
};

class FlatIndex {
 public:
  FlatIndex(const EmbeddingStore& store, Metric metric);

  Metric metric() const noexcept { return metric_; }
  std::size_t size() const noexcept { return table_.size(); }
  std::size_t dim() const noexcept { return table_.dim(); }
  const VectorTable& table() const noexcept { return table_; }

 private:
  Metric metric_;
  VectorTable table_;
};

struct IvfParams {
  std::size_t nlist = 0;  // 0: default_nlist(N)
  std::size_t nprobe_default = 0;  // 0: default_nprobe(nlist)
  std::size_t kmeans_iters = 25;
  std::uint64_t seed = 0;
};

std::size_t default_nlist(std::size_t n);
std::size_t default_nprobe(std::size_t nlist);

class IvfIndex {
 public:
  /// Trains centroids with seeded k-means++ and Lloyd iterations (L2).
  IvfIndex(const EmbeddingStore& store, Metric metric, IvfParams params);
  /// Rebuilds posting lists against given centroids.
  IvfIndex(const EmbeddingStore& store, Metric metric, IvfParams params, std::vector<double> centroids);

  Metric metric() const noexcept { return metric_; }
  std::size_t size() const noexcept { return table_.size(); }
  std::size_t dim() const noexcept { return table_.dim(); }
  std::size_t nlist() const noexcept { return params_.nlist; }
  std::size_t nprobe_default() const noexcept { return params_.nprobe_default; }
  const IvfParams& params() const noexcept { return params_; }
  const VectorTable& table() const noexcept { return table_; }
  std::span<const double> centroid(std::size_t c) const noexcept { return {centroids_.data() + c * dim(), dim()}; }
  const std::vector<double>& centroids() const noexcept { return centroids_; }
  /// Row indices of the entries in list c, ascending.
  const std::vector<std::size_t>& list(std::size_t c) const noexcept { return lists_[c]; }

  /// The nprobe centroids nearest to q under L2, nearest first.
  std::vector<std::size_t> probe_order(std::span<const double> q, std::size_t nprobe) const;

 private:
  void check_params();
  void assign_lists();

  Metric metric_;
  IvfParams params_;
  VectorTable table_;
  std::vector<double> centroids_;
  std::vector<std::vector<std::size_t>> lists_;
};

FlatIndex build_flat(const EmbeddingStore& store, Metric metric);
IvfIndex build_ivf(const EmbeddingStore& store, Metric metric, std::size_t nlist, std::size_t kmeans_iters,
                   std::uint64_t seed);

/// Ascending (distance, id); exact.
std::vector<Neighbor> knn_flat(const FlatIndex& idx, std::span<const double> q, std::size_t k);
/// Exact ranking over the union of the nprobe nearest posting lists.
std::vector<Neighbor> knn_ivf(const IvfIndex& idx, std::span<const double> q, std::size_t k, std::size_t nprobe);

/// One result list per query; queries fan out over `workers`.
std::vector<std::vector<Neighbor>> knn_flat_batch(const FlatIndex& idx, const EmbeddingStore& queries,
                                                  std::size_t k, std::size_t workers);
std::vector<std::vector<Neighbor>> knn_ivf_batch(const IvfIndex& idx, const EmbeddingStore& queries,
                                                 std::size_t k, std::size_t nprobe, std::size_t workers);

using AnyIndex = std::variant<FlatIndex, IvfIndex>;

/// Directory with embeddings.csv, index.json and, for IVF, centroids.csv.
void save_index(const FlatIndex& idx, const std::string& dir);
void save_index(const IvfIndex& idx, const std::string& dir);
AnyIndex load_index(const std::string& dir);

}  // namespace trajsim
