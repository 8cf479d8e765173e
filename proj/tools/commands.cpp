#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <random>
#include <unordered_set>

#include "trajsim/analytics.hpp"
#include "trajsim/embedding.hpp"
#include "trajsim/measures.hpp"
#include "trajsim/parallel.hpp"
#include "trajsim/report.hpp"
#include "trajsim/timing.hpp"
#include "trajsim/trajectory.hpp"
#include "trajsim/vector_index.hpp"
#include "trajsim/worker_team.hpp"

namespace trajsim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::pair<std::size_t, std::size_t> parse_range(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(s);
    const std::size_t lo = std::stoul(s.substr(0, comma));
    const std::size_t hi = std::stoul(s.substr(comma + 1));
    if (lo < 1 || lo > hi) throw std::invalid_argument(s);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError("--n-range must be min,max with 1 <= min <= max, got '" + s + "'");
  }
}

Dataset load_data(const DataOptions& o, std::size_t default_synthetic = 0) {
  if (!o.data.empty()) {
    if (o.synthetic) throw UsageError("--data and --synthetic are mutually exclusive");
    return load_csv(o.data);
  }
  const std::size_t count = o.synthetic ? o.synthetic : default_synthetic;
  if (count == 0) throw UsageError("need --data or --synthetic");
  const auto [lo, hi] = parse_range(o.n_range);
  return generate_synthetic(count, lo, hi, o.seed, o.timestamped);
}

json dataset_json(const Dataset& ds) {
  return {{"source", ds.source()},
          {"trajectories", ds.size()},
          {"points", ds.point_count()},
          {"timestamped", !ds.empty() && ds[0].timestamped()}};
}

MeasureSpec make_spec(const MeasureOptions& o) {
  MeasureSpec spec = MeasureSpec::with_defaults(parse_measure(o.measure));
  auto& p = spec.params;
  if (o.eps) p.eps_spatial = *o.eps;
  if (o.eps_t) p.eps_temporal = *o.eps_t;
  if (o.gap_x || o.gap_y) {
    const Point base = p.gap_point.value_or(Point{0.0, 0.0, std::nullopt});
    p.gap_point = Point{o.gap_x.value_or(base.x), o.gap_y.value_or(base.y), std::nullopt};
  }
  if (o.sax_word) p.sax_word_length = *o.sax_word;
  if (o.sax_alphabet) p.sax_alphabet = *o.sax_alphabet;
  if (o.sax_threshold) p.sax_symbol_threshold = *o.sax_threshold;
  validate_params(spec);
  return spec;
}

json spec_json(const MeasureSpec& spec) {
  json j = {{"measure", std::string(measure_name(spec.kind))}};
  const auto& p = spec.params;
  if (p.eps_spatial) j["eps"] = *p.eps_spatial;
  if (p.eps_temporal) j["eps_t"] = *p.eps_temporal;
  if (p.gap_point) j["gap"] = {p.gap_point->x, p.gap_point->y};
  if (p.sax_word_length) j["sax_word"] = *p.sax_word_length;
  if (p.sax_alphabet) j["sax_alphabet"] = *p.sax_alphabet;
  if (p.sax_symbol_threshold) j["sax_threshold"] = *p.sax_symbol_threshold;
  return j;
}

std::size_t resolve_workers(const RunOptions& o) { return o.workers ? o.workers : default_worker_count(); }

Assignment parse_assignment(const std::string& s) {
  if (s == "contiguous") return Assignment::kContiguous;
  if (s == "interleaved") return Assignment::kInterleaved;
  throw UsageError("--assignment must be contiguous or interleaved");
}

BatchMode parse_engine(const std::string& s) {
  if (s == "pair_per_worker") return BatchMode::kPairPerWorker;
  if (s == "intra_pair") return BatchMode::kIntraPair;
  throw UsageError("--engine must be pair_per_worker or intra_pair");
}

ParallelConfig make_config(const RunOptions& o) {
  ParallelConfig cfg;
  cfg.workers_per_pair = o.workers_per_pair;
  cfg.batch_workers = resolve_workers(o);
  cfg.assignment = parse_assignment(o.assignment);
  cfg.max_threads = cfg.batch_workers;
  cfg.validate();
  return cfg;
}

void check_reps(const RunOptions& o) {
  if (o.reps == 0) throw UsageError("--reps must be >= 1");
  if (o.timeout_s && !(*o.timeout_s > 0.0)) throw UsageError("--timeout-s must be positive");
}

BenchReport base_report(const std::string& experiment, const RunOptions& o) {
  BenchReport r;
  r.experiment = experiment;
  r.repetitions = o.reps;
  r.workers.workers = resolve_workers(o);
  r.workers.workers_per_pair = o.workers_per_pair;
  return r;
}

fs::path out_file(const RunOptions& o, const std::string& name) {
  fs::create_directories(o.out);
  return fs::path(o.out) / name;
}

void write_report(const BenchReport& r, const RunOptions& o) {
  const json doc = r.to_json();
  const auto problems = validate_report(doc);
  if (!problems.empty()) throw Error("internal: report fails validation: " + problems.front());
  const fs::path path = o.report.empty() ? out_file(o, "report.json") : fs::path(o.report);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file(path.string(), doc.dump(2) + "\n");
  std::cout << "report: " << path.string() << "\n";
}

class Deadline {
 public:
  explicit Deadline(std::optional<double> limit) : limit_(limit) {}
  bool expired() const { return limit_ && sw_.seconds() > *limit_; }

 private:
  std::optional<double> limit_;
  Stopwatch sw_;
};

std::optional<FfnWeights> weights_from(const WeightOptions& o) {
  if (!o.weights.empty()) {
    if (o.weights_seed) throw UsageError("--weights and --weights-seed are mutually exclusive");
    return load_weights(o.weights);
  }
  if (o.weights_seed) {
    if (o.d == 0 || o.input_length == 0) throw UsageError("--d and --input-length must be >= 1");
    return FfnWeights::random(o.d, o.input_length, *o.weights_seed);
  }
  return std::nullopt;
}

json weights_json(const WeightOptions& o, const FfnWeights& w) {
  json j = {{"d", w.d}, {"input_length", w.L}};
  if (!o.weights.empty()) j["weights"] = o.weights;
  if (o.weights_seed) j["weights_seed"] = *o.weights_seed;
  return j;
}

// Strips the "pair <k>: " prefix of a BatchError message.
std::string batch_detail(const BatchError& e) {
  const std::string what = e.what();
  const auto pos = what.find(": ");
  return pos == std::string::npos ? what : what.substr(pos + 2);
}

}  // namespace

int cmd_gen(const GenOptions& o) {
  const auto [lo, hi] = parse_range(o.n_range);
  const Dataset ds = generate_synthetic(o.count, lo, hi, o.seed, o.timestamped);
  const fs::path path(o.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_csv(ds, o.out);
  std::cout << "wrote " << ds.size() << " trajectories to " << o.out << "\n";
  return 0;
}

int cmd_sim(const SimOptions& o) {
  check_reps(o.run);
  if (o.mode != "single" && o.mode != "batched") throw UsageError("--mode must be single or batched");
  if (o.pairs == 0) throw UsageError("--pairs must be >= 1");
  if (o.batch_size == 0) throw UsageError("--batch-size must be >= 1");
  const BatchMode engine = parse_engine(o.engine);

  Stopwatch setup;
  const MeasureSpec spec = make_spec(o.measure);
  const ParallelConfig cfg = make_config(o.run);
  const Dataset ds = load_data(o.data);
  if (ds.empty()) throw ValidationError("dataset is empty");
  const auto idx = sample_pair_indices(ds, o.pairs, o.data.seed);
  std::vector<TrajectoryPair> pairs;
  pairs.reserve(idx.size());
  for (const auto& [a, b] : idx) pairs.emplace_back(std::cref(ds[a]), std::cref(ds[b]));
  std::optional<WorkerTeam> team;
  if (o.mode == "single") team.emplace(cfg.pair_threads());

  BenchReport report = base_report("sim", o.run);
  report.process_setup_s = setup.seconds();
  report.mode = o.mode;
  report.workers.batch_size = o.batch_size;
  report.config = spec_json(spec);
  report.config["pairs"] = o.pairs;
  report.config["seed"] = o.data.seed;
  report.config["assignment"] = o.run.assignment;
  if (o.mode == "batched") report.config["engine"] = o.engine;
  report.dataset = dataset_json(ds);

  std::vector<double> scores(pairs.size());
  Deadline deadline(o.run.timeout_s);
  for (std::size_t rep = 0; rep < o.run.reps && report.status == "ok"; ++rep) {
    TimingBreakdown t;
    Stopwatch total;
    if (o.mode == "single") {
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        Stopwatch sw;
        const Trajectory& a = pairs[k].first.get();
        const Trajectory& b = pairs[k].second.get();
        try {
          validate_inputs(spec, a, b);
          t.pre_s += sw.lap();
          scores[k] = par_evaluate(spec, a, b, cfg, *team);
          t.cmp_s += sw.lap();
        } catch (const ParameterError&) {
          throw;
        } catch (const Error& e) {
          throw BatchError(k, e.what());
        }
        if (deadline.expired()) {
          report.status = "OT";
          break;
        }
      }
    } else {
      for (std::size_t lo = 0; lo < pairs.size(); lo += o.batch_size) {
        const std::size_t n = std::min(o.batch_size, pairs.size() - lo);
        BatchResult r;
        try {
          r = run_batch(spec, std::span(pairs).subspan(lo, n), cfg, engine);
        } catch (const BatchError& e) {
          throw BatchError(lo + e.pair_index(), batch_detail(e));
        }
        std::copy(r.scores.begin(), r.scores.end(), scores.begin() + static_cast<std::ptrdiff_t>(lo));
        t.pre_s += r.timing.pre_s;
        t.cmp_s += r.timing.cmp_s;
        if (deadline.expired()) {
          report.status = "OT";
          break;
        }
      }
    }
    t.total_s = total.seconds();
    if (report.status == "ok") report.runs.push_back(t);
  }

  if (report.status == "ok") {
    std::string csv = "pair,a,b,score\n";
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      csv += std::to_string(k) + "," + pairs[k].first.get().id() + "," + pairs[k].second.get().id() + "," +
             format_double(scores[k]) + "\n";
    }
    const auto path = out_file(o.run, "scores.csv");
    write_file(path.string(), csv);
    report.outputs["scores"] = path.string();
    const double cmp = report.mean().cmp_s;
    report.results["pairs_per_s"] = cmp > 0.0 ? static_cast<double>(pairs.size()) / cmp : 0.0;
  }
  write_report(report, o.run);
  return 0;
}

int cmd_knn(const KnnOptions& o) {
  check_reps(o.run);
  if (o.k == 0) throw UsageError("--k must be >= 1");
  if (o.index != "flat" && o.index != "ivf") throw UsageError("--index must be flat or ivf");
  const BatchMode engine = parse_engine(o.engine);
  const Metric metric = parse_metric(o.metric);

  Stopwatch setup;
  const MeasureSpec spec = make_spec(o.measure);
  const ParallelConfig cfg = make_config(o.run);
  Dataset all = load_data(o.data);
  Dataset D, Q;
  if (!o.query_data.empty()) {
    D = std::move(all);
    Q = load_csv(o.query_data);
    for (const auto& q : Q.trajectories()) {
      if (D.find(q.id())) throw ValidationError("query '" + q.id() + "' also appears in the data set");
    }
  } else {
    if (o.queries == 0 || o.queries >= all.size()) {
      throw UsageError("--queries must be in [1, " + std::to_string(all.size()) + ")");
    }
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(o.data.seed ^ 0x9e3779b97f4a7c15ULL);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> is_query(all.size(), false);
    for (std::size_t i = 0; i < o.queries; ++i) is_query[order[i]] = true;
    std::vector<Trajectory> d, q;
    for (std::size_t i = 0; i < all.size(); ++i) (is_query[i] ? q : d).push_back(all[i]);
    D = Dataset(std::move(d), all.source());
    Q = Dataset(std::move(q), all.source() + " (queries)");
  }
  if (Q.empty()) throw UsageError("no query trajectories");
  if (o.k > D.size()) throw UsageError("--k " + std::to_string(o.k) + " exceeds data size " + std::to_string(D.size()));

  std::optional<FfnWeights> weights;
  if (!o.truth_only) {
    weights = weights_from(o.weights);
    if (!weights) throw UsageError("need --weights or --weights-seed (or --truth-only)");
  }

  BenchReport report = base_report("knn", o.run);
  report.process_setup_s = setup.seconds();
  report.config = spec_json(spec);
  report.config["k"] = o.k;
  report.config["queries"] = Q.size();
  report.config["truth_only"] = o.truth_only;
  report.config["engine"] = o.engine;
  report.dataset = dataset_json(D);
  report.dataset["queries"] = Q.size();
  Deadline deadline(o.run.timeout_s);

  auto compute_truth = [&](std::vector<KnnResult>& out, TimingBreakdown& t) {
    Stopwatch sw;
    out.clear();
    for (const auto& q : Q.trajectories()) {
      out.push_back(knn_exact(D, q, o.k, spec, cfg, engine));
      if (deadline.expired()) return false;
    }
    t.cmp_s = sw.seconds();
    t.total_s = t.cmp_s;
    return true;
  };

  std::vector<KnnResult> truth;
  if (o.truth_only) {
    for (std::size_t rep = 0; rep < o.run.reps; ++rep) {
      TimingBreakdown t;
      if (!compute_truth(truth, t)) {
        report.status = "OT";
        break;
      }
      report.runs.push_back(t);
    }
    if (report.status == "ok") {
      const auto path = out_file(o.run, "truth.csv");
      write_file(path.string(), format_knn(truth));
      report.outputs["truth"] = path.string();
    }
    write_report(report, o.run);
    return 0;
  }

  TimingBreakdown truth_t;
  if (!compute_truth(truth, truth_t)) {
    report.status = "OT";
    write_report(report, o.run);
    return 0;
  }
  report.sub_timings["truth_s"] = truth_t.cmp_s;
  report.config["encoder"] = weights_json(o.weights, *weights);

  // Index over D: reuse a persisted one or encode and build here.
  std::optional<AnyIndex> index;
  Stopwatch build;
  if (!o.index_dir.empty()) {
    index = load_index(o.index_dir);
    const VectorTable& table = std::visit([](const auto& i) -> const VectorTable& { return i.table(); }, *index);
    if (table.dim() != weights->d) throw ValidationError("index dimension does not match the encoder");
    // Queries sampled out of an indexed data set are dropped from the index;
    // the stored vectors and centroids are reused as they are.
    EmbeddingStore kept(table.dim());
    for (std::size_t r = 0; r < table.size(); ++r) {
      if (D.find(table.id(r))) {
        auto v = table.row(r);
        kept.add({table.id(r), {v.begin(), v.end()}});
      } else if (!Q.find(table.id(r))) {
        throw ValidationError("index entry '" + table.id(r) + "' is not in the data set");
      }
    }
    if (kept.size() != D.size()) throw ValidationError("index does not cover the data set");
    if (kept.size() != table.size()) {
      if (auto* ivf = std::get_if<IvfIndex>(&*index)) {
        IvfParams p = ivf->params();
        p.nlist = std::min(p.nlist, kept.size());
        if (p.nlist == ivf->nlist()) {
          std::vector<double> cents = ivf->centroids();
          index.emplace(std::in_place_type<IvfIndex>, kept, ivf->metric(), p, std::move(cents));
        } else {
          index.emplace(std::in_place_type<IvfIndex>, kept, ivf->metric(), p);
        }
      } else {
        const Metric m = std::get<FlatIndex>(*index).metric();
        index.emplace(std::in_place_type<FlatIndex>, kept, m);
      }
    }
    report.sub_timings["index_load_s"] = build.seconds();
    report.config["index_dir"] = o.index_dir;
  } else {
    double emb_s = 0.0;
    const EmbeddingStore store = encode_dataset(D, *weights, resolve_workers(o.run), &emb_s);
    if (o.index == "flat") {
      index.emplace(std::in_place_type<FlatIndex>, store, metric);
    } else {
      index.emplace(std::in_place_type<IvfIndex>, store, metric, IvfParams{o.nlist, o.nprobe, o.kmeans_iters, o.data.seed});
    }
    report.sub_timings["data_emb_s"] = emb_s;
    report.sub_timings["index_build_s"] = build.seconds();
  }

  std::size_t nprobe = 0;
  if (auto* ivf = std::get_if<IvfIndex>(&*index)) {
    nprobe = o.nprobe ? o.nprobe : ivf->nprobe_default();
    if (nprobe > ivf->nlist()) {
      throw UsageError("--nprobe " + std::to_string(nprobe) + " exceeds nlist " + std::to_string(ivf->nlist()));
    }
    report.config["index"] = {{"kind", "ivf"}, {"metric", metric_name(ivf->metric())}, {"nlist", ivf->nlist()},
                              {"nprobe", nprobe}};
  } else {
    report.config["index"] = {{"kind", "flat"}, {"metric", metric_name(std::get<FlatIndex>(*index).metric())}};
  }

  std::vector<KnnResult> results;
  for (std::size_t rep = 0; rep < o.run.reps && report.status == "ok"; ++rep) {
    TimingBreakdown t;
    Stopwatch total;
    results.clear();
    for (const auto& q : Q.trajectories()) {
      EmbeddingKnn r = std::holds_alternative<FlatIndex>(*index)
                           ? knn_embedding(std::get<FlatIndex>(*index), *weights, q, o.k)
                           : knn_embedding(std::get<IvfIndex>(*index), *weights, q, o.k, nprobe);
      t.emb_s += r.timing.emb_s;
      t.cmp_s += r.timing.cmp_s;
      results.push_back(std::move(r.result));
      if (deadline.expired()) {
        report.status = "OT";
        break;
      }
    }
    t.total_s = total.seconds();
    if (report.status == "ok") report.runs.push_back(t);
  }

  if (report.status == "ok") {
    json per_query = json::array();
    double sum = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const double hr = hit_ratio(results[i], truth[i]);
      per_query.push_back(hr);
      sum += hr;
    }
    report.accuracy = {{"k", o.k}, {"hr_at_k", sum / static_cast<double>(results.size())}, {"hr_per_query", per_query}};
    const auto knn_path = out_file(o.run, "knn.csv");
    const auto truth_path = out_file(o.run, "truth.csv");
    write_file(knn_path.string(), format_knn(results));
    write_file(truth_path.string(), format_knn(truth));
    report.outputs = {{"knn", knn_path.string()}, {"truth", truth_path.string()}};
  }
  write_report(report, o.run);
  return 0;
}

int cmd_cluster(const ClusterOptions& o) {
  check_reps(o.run);
  if (o.k == 0) throw UsageError("--k must be >= 1");
  if (o.max_iters == 0) throw UsageError("--max-iters must be >= 1");
  const Metric metric = parse_metric(o.metric);

  Stopwatch setup;
  const MeasureSpec spec = make_spec(o.measure);
  const ParallelConfig cfg = make_config(o.run);
  const std::optional<FfnWeights> weights = weights_from(o.weights);
  std::string source = o.source;
  if (source == "auto") source = weights ? "both" : "raw";
  if (source != "raw" && source != "embedding" && source != "both") {
    throw UsageError("--source must be raw, embedding, both or auto");
  }
  const bool raw = source != "embedding";
  const bool emb = source != "raw";
  if (emb && !weights) throw UsageError("embedding clustering needs --weights or --weights-seed");
  if (raw && larger_is_more_similar(spec.kind)) {
    throw UsageError("k-medoids needs a distance measure; '" + std::string(measure_name(spec.kind)) +
                     "' is a similarity");
  }
  const Dataset ds = load_data(o.data, 1000);
  if (o.k > ds.size()) throw UsageError("--k " + std::to_string(o.k) + " exceeds data size " + std::to_string(ds.size()));
  std::vector<std::string> ids;
  for (const auto& t : ds.trajectories()) ids.push_back(t.id());
  const std::size_t workers = resolve_workers(o.run);

  BenchReport report = base_report("cluster", o.run);
  report.process_setup_s = setup.seconds();
  report.config = {{"k", o.k}, {"source", source}, {"max_iters", o.max_iters}, {"seed", o.data.seed}};
  if (raw) report.config["raw"] = spec_json(spec);
  if (emb) {
    report.config["encoder"] = weights_json(o.weights, *weights);
    report.config["metric"] = metric_name(metric);
  }
  report.dataset = dataset_json(ds);
  Deadline deadline(o.run.timeout_s);

  Clustering raw_c, emb_c;
  DistanceMatrix raw_m;
  for (std::size_t rep = 0; rep < o.run.reps; ++rep) {
    TimingBreakdown t;
    Stopwatch total, sw;
    json sub;
    if (raw) {
      raw_m = precompute_distance_matrix(ds, spec, cfg);
      const double matrix_s = sw.lap();
      raw_c = kmedoids(ids, raw_m, o.k, o.data.seed, o.max_iters, workers);
      const double cluster_s = sw.lap();
      t.cmp_s += matrix_s + cluster_s;
      sub["raw"] = {{"matrix_s", matrix_s}, {"cluster_s", cluster_s}};
    }
    if (emb && !deadline.expired()) {
      double emb_s = 0.0;
      const EmbeddingStore store = encode_dataset(ds, *weights, workers, &emb_s);
      sw.lap();
      const DistanceMatrix m = embedding_distance_matrix(store, metric, workers);
      const double matrix_s = sw.lap();
      emb_c = kmedoids(ids, m, o.k, o.data.seed, o.max_iters, workers);
      const double cluster_s = sw.lap();
      t.emb_s += emb_s;
      t.cmp_s += matrix_s + cluster_s;
      sub["embedding"] = {{"emb_s", emb_s}, {"matrix_s", matrix_s}, {"cluster_s", cluster_s}};
    }
    t.total_s = total.seconds();
    if (deadline.expired()) {
      report.status = "OT";
      break;
    }
    report.runs.push_back(t);
    report.sub_timings = sub;
  }

  if (report.status == "ok") {
    auto describe = [](const Clustering& c) {
      return json{{"total_cost", c.total_cost}, {"iterations", c.iterations}, {"converged", c.converged},
                  {"medoid_ids", c.medoid_ids}, {"cost_history", c.cost_history}};
    };
    if (raw) {
      const auto path = out_file(o.run, "clusters_raw.csv");
      write_file(path.string(), format_clustering(raw_c));
      report.outputs["clusters_raw"] = path.string();
      report.results["raw"] = describe(raw_c);
      if (o.save_matrix) {
        const auto mpath = out_file(o.run, "distances.csv");
        write_file(mpath.string(), format_distance_matrix(raw_m));
        report.outputs["distances"] = mpath.string();
      }
    }
    if (emb) {
      const auto path = out_file(o.run, "clusters_embedding.csv");
      write_file(path.string(), format_clustering(emb_c));
      report.outputs["clusters_embedding"] = path.string();
      report.results["embedding"] = describe(emb_c);
    }
    if (raw && emb) {
      report.accuracy = {{"rand_index", rand_index(raw_c, emb_c)},
                         {"pair_recall", pair_recall(raw_c.assignment, emb_c.assignment)}};
    }
  }
  write_report(report, o.run);
  return 0;
}

int cmd_embed(const EmbedOptions& o) {
  check_reps(o.run);
  Stopwatch setup;
  const std::optional<FfnWeights> weights = weights_from(o.weights);
  if (!weights) throw UsageError("need --weights or --weights-seed");
  const Dataset ds = load_data(o.data);
  const std::size_t workers = resolve_workers(o.run);

  BenchReport report = base_report("embed", o.run);
  report.process_setup_s = setup.seconds();
  report.config = {{"encoder", weights_json(o.weights, *weights)}};
  report.dataset = dataset_json(ds);
  Deadline deadline(o.run.timeout_s);

  EmbeddingStore store;
  for (std::size_t rep = 0; rep < o.run.reps; ++rep) {
    TimingBreakdown t;
    Stopwatch total;
    store = encode_dataset(ds, *weights, workers, &t.emb_s);
    t.total_s = total.seconds();
    if (deadline.expired()) {
      report.status = "OT";
      break;
    }
    report.runs.push_back(t);
  }
  if (report.status == "ok") {
    const auto path = out_file(o.run, "embeddings.csv");
    save_store(store, path.string());
    report.outputs["embeddings"] = path.string();
    if (!o.save_weights.empty()) {
      save_weights(*weights, o.save_weights);
      report.outputs["weights"] = o.save_weights;
    }
  }
  write_report(report, o.run);
  return 0;
}

int cmd_index(const IndexOptions& o) {
  check_reps(o.run);
  if (o.index != "flat" && o.index != "ivf") throw UsageError("--index must be flat or ivf");
  const Metric metric = parse_metric(o.metric);
  Stopwatch setup;
  const EmbeddingStore store = load_store(o.embeddings);
  if (store.empty()) throw ValidationError("embedding file holds no entries");

  BenchReport report = base_report("index", o.run);
  report.process_setup_s = setup.seconds();
  report.config = {{"kind", o.index}, {"metric", metric_name(metric)}, {"seed", o.seed}};
  report.dataset = {{"source", o.embeddings}, {"trajectories", store.size()}, {"dim", store.dim()}};
  Deadline deadline(o.run.timeout_s);

  std::optional<AnyIndex> index;
  for (std::size_t rep = 0; rep < o.run.reps; ++rep) {
    TimingBreakdown t;
    Stopwatch total;
    if (o.index == "flat") {
      index.emplace(std::in_place_type<FlatIndex>, store, metric);
    } else {
      index.emplace(std::in_place_type<IvfIndex>, store, metric, IvfParams{o.nlist, o.nprobe, o.kmeans_iters, o.seed});
    }
    t.cmp_s = total.seconds();
    t.total_s = t.cmp_s;
    if (deadline.expired()) {
      report.status = "OT";
      break;
    }
    report.runs.push_back(t);
  }
  if (report.status == "ok") {
    fs::create_directories(o.run.out);
    std::visit([&](const auto& i) { save_index(i, o.run.out); }, *index);
    if (const auto* ivf = std::get_if<IvfIndex>(&*index)) {
      report.config["nlist"] = ivf->nlist();
      report.config["nprobe_default"] = ivf->nprobe_default();
      report.config["kmeans_iters"] = ivf->params().kmeans_iters;
    }
    report.outputs["index_dir"] = o.run.out;
  }
  write_report(report, o.run);
  return 0;
}

}  // namespace trajsim::cli
