#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "trajsim/trajectory.hpp"

namespace trajsim {

struct Embedding {
  std::string id;
  std::vector<double> vec;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Two-layer feed-forward encoder: h = ReLU(x W1 + b1), out = h W2 + b2, where
/// x is the trajectory flattened to 2L coordinates. Matrices are row-major.
struct FfnWeights {
  std::size_t d = 0;
  std::size_t L = 0;
  std::vector<double> w1;  // 2L x d
  std::vector<double> b1;  // d
  std::vector<double> w2;  // d x d
  std::vector<double> b2;  // d

  void validate() const;

  static FfnWeights zeros(std::size_t d, std::size_t L);
  /// Entries uniform in (-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static FfnWeights random(std::size_t d, std::size_t L, std::uint64_t seed);

  friend bool operator==(const FfnWeights&, const FfnWeights&) = default;
};

constexpr std::size_t kDefaultDim = 128;
constexpr std::size_t kDefaultInputLength = 200;

/// [x1, y1, x2, y2, ...] over exactly L points: truncated past L, padded with
/// the last point below L.
std::vector<double> flatten_input(const Trajectory& t, std::size_t L);

Embedding ffn_encode(const Trajectory& t, const FfnWeights& w);

double l1_distance(std::span<const double> a, std::span<const double> b);
double l2_distance(std::span<const double> a, std::span<const double> b);

/// 1 - ||h - h'||_1.
double similarity(const Embedding& h, const Embedding& h2);

/// Embeddings of one dimension with unique ids, in insertion order.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t d = 0) : d_(d) {}

  void add(Embedding e);
  std::size_t dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::span<const Embedding> entries() const noexcept { return entries_; }
  const Embedding& operator[](std::size_t i) const noexcept { return entries_[i]; }
  const Embedding* find(const std::string& id) const;

  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
    return a.d_ == b.d_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t d_;
  std::vector<Embedding> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// One embedding per trajectory, in dataset order. `emb_seconds` receives the
/// wall time of the encoding.
EmbeddingStore encode_dataset(const Dataset& ds, const FfnWeights& w, std::size_t workers,
                              double* emb_seconds = nullptr);

// `id,v1,...,vd` CSV.
std::string format_store(const EmbeddingStore& s);
EmbeddingStore parse_store(std::string_view text);
void save_store(const EmbeddingStore& s, const std::string& path);
EmbeddingStore load_store(const std::string& path);

// Blocks `W1 2L d`, `b1 1 d`, `W2 d d`, `b2 1 d`, each followed by its rows.
std::string format_weights(const FfnWeights& w);
FfnWeights parse_weights(std::string_view text);
void save_weights(const FfnWeights& w, const std::string& path);
FfnWeights load_weights(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace trajsim
