#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "trajsim/errors.hpp"

namespace trajsim::cli {

/// Bad flag combination; the tool exits with status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct DataOptions {
  std::string data;              // CSV path
  std::size_t synthetic = 0;     // generate this many when no path
  std::string n_range = "20,200";
  bool timestamped = false;
  std::uint64_t seed = 1;
};

struct MeasureOptions {
  std::string measure = "dtw";
  std::optional<double> eps;
  std::optional<double> eps_t;
  std::optional<double> gap_x;
  std::optional<double> gap_y;
  std::optional<std::size_t> sax_word;
  std::optional<std::size_t> sax_alphabet;
  std::optional<std::size_t> sax_threshold;
};

struct RunOptions {
  std::size_t workers = 0;  // 0: TRAJSIM_WORKERS or hardware concurrency
  std::size_t workers_per_pair = 64;
  std::string assignment = "contiguous";
  std::size_t reps = 5;
  std::optional<double> timeout_s;
  std::string out = "trajsim-out";
  std::string report;  // default <out>/report.json
};

struct WeightOptions {
  std::string weights;
  std::optional<std::uint64_t> weights_seed;
  std::size_t d = 128;
  std::size_t input_length = 200;
};

struct GenOptions {
  std::size_t count = 1000;
  std::string n_range = "20,200";
  std::uint64_t seed = 1;
  bool timestamped = false;
  std::string out = "trajectories.csv";
};

struct SimOptions {
  DataOptions data;
  MeasureOptions measure;
  RunOptions run;
  std::size_t pairs = 1000;
  std::string mode = "batched";
  std::string engine = "pair_per_worker";
  std::size_t batch_size = 512;
};

struct KnnOptions {
  DataOptions data;
  MeasureOptions measure;
  RunOptions run;
  WeightOptions weights;
  std::string query_data;
  std::size_t queries = 10;
  std::size_t k = 50;
  std::string index = "ivf";
  std::string index_dir;
  std::string metric = "l2";
  std::size_t nlist = 0;
  std::size_t nprobe = 0;
  std::size_t kmeans_iters = 25;
  bool truth_only = false;
  std::string engine = "pair_per_worker";
};

struct ClusterOptions {
  DataOptions data;
  MeasureOptions measure;
  RunOptions run;
  WeightOptions weights;
  std::size_t k = 10;
  std::string source = "auto";  // raw | embedding | both | auto
  std::string metric = "l1";
  std::size_t max_iters = 100;
  bool save_matrix = false;
};

struct EmbedOptions {
  DataOptions data;
  RunOptions run;
  WeightOptions weights;
  std::string save_weights;
};

struct IndexOptions {
  RunOptions run;
  std::string embeddings;
  std::string index = "ivf";
  std::string metric = "l2";
  std::size_t nlist = 0;
  std::size_t nprobe = 0;
  std::size_t kmeans_iters = 25;
  std::uint64_t seed = 1;
};

int cmd_gen(const GenOptions& o);
int cmd_sim(const SimOptions& o);
int cmd_knn(const KnnOptions& o);
int cmd_cluster(const ClusterOptions& o);
int cmd_embed(const EmbedOptions& o);
int cmd_index(const IndexOptions& o);

}  // namespace trajsim::cli
