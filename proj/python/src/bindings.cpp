#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "trajsim/analytics.hpp"
#include "trajsim/embedding.hpp"
#include "trajsim/errors.hpp"
#include "trajsim/measures.hpp"
#include "trajsim/parallel.hpp"
#include "trajsim/report.hpp"
#include "trajsim/trajectory.hpp"
#include "trajsim/vector_index.hpp"

namespace py = pybind11;
using namespace trajsim;

namespace {

Trajectory make_trajectory(std::string id, const std::vector<std::vector<double>>& rows) {
  std::vector<Point> pts;
  pts.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() == 2) {
      pts.push_back({r[0], r[1], std::nullopt});
    } else if (r.size() == 3) {
      pts.push_back({r[0], r[1], r[2]});
    } else {
      throw ValidationError("points must be (x, y) or (x, y, t)");
    }
  }
  return Trajectory(std::move(id), std::move(pts));
}

py::list points_of(const Trajectory& t) {
  py::list out;
  for (const auto& p : t.points()) {
    if (p.t) {
      out.append(py::make_tuple(p.x, p.y, *p.t));
    } else {
      out.append(py::make_tuple(p.x, p.y));
    }
  }
  return out;
}

MeasureSpec make_spec(const std::string& name, std::optional<double> eps, std::optional<double> eps_t,
                      std::optional<std::pair<double, double>> gap, std::optional<std::size_t> sax_word,
                      std::optional<std::size_t> sax_alphabet, std::optional<std::size_t> sax_threshold) {
  MeasureSpec s = MeasureSpec::with_defaults(parse_measure(name));
  if (eps) s.params.eps_spatial = *eps;
  if (eps_t) s.params.eps_temporal = *eps_t;
  if (gap) s.params.gap_point = Point{gap->first, gap->second, std::nullopt};
  if (sax_word) s.params.sax_word_length = *sax_word;
  if (sax_alphabet) s.params.sax_alphabet = *sax_alphabet;
  if (sax_threshold) s.params.sax_symbol_threshold = *sax_threshold;
  validate_params(s);
  return s;
}

ParallelConfig make_config(std::size_t workers_per_pair, std::size_t workers, const std::string& assignment) {
  ParallelConfig cfg;
  cfg.workers_per_pair = workers_per_pair;
  cfg.batch_workers = workers ? workers : default_worker_count();
  cfg.max_threads = cfg.batch_workers;
  if (assignment == "contiguous") {
    cfg.assignment = Assignment::kContiguous;
  } else if (assignment == "interleaved") {
    cfg.assignment = Assignment::kInterleaved;
  } else {
    throw ParameterError("assignment must be 'contiguous' or 'interleaved'");
  }
  cfg.validate();
  return cfg;
}

py::list neighbors_list(const std::vector<Neighbor>& ns) {
  py::list out;
  for (const auto& n : ns) out.append(py::make_tuple(n.id, n.distance));
  return out;
}

py::list ranked_list(const KnnResult& r) {
  py::list out;
  for (const auto& n : r.neighbors) out.append(py::make_tuple(n.id, n.score));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trajectory similarity measures, parallel evaluation, embeddings and vector search";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", error.ptr());
  py::register_exception<BatchError>(m, "BatchError", error.ptr());

  py::class_<Trajectory>(m, "Trajectory")
      .def(py::init(&make_trajectory), py::arg("id"), py::arg("points"))
      .def_property_readonly("id", &Trajectory::id)
      .def_property_readonly("points", &points_of)
      .def_property_readonly("timestamped", &Trajectory::timestamped)
      .def("__len__", &Trajectory::size)
      .def("__eq__", [](const Trajectory& a, const Trajectory& b) { return a == b; })
      .def("__repr__", [](const Trajectory& t) {
        return "Trajectory(id='" + t.id() + "', n=" + std::to_string(t.size()) + ")";
      });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](std::vector<Trajectory> ts, std::string source) { return Dataset(std::move(ts), source); }),
           py::arg("trajectories"), py::arg("source") = "")
      .def("__len__", &Dataset::size)
      .def("__getitem__",
           [](const Dataset& d, std::size_t i) {
             if (i >= d.size()) throw py::index_error();
             return d[i];
           })
      .def_property_readonly("source", &Dataset::source)
      .def_property_readonly("point_count", &Dataset::point_count)
      .def("find", &Dataset::find)
      .def("to_csv", &format_csv);

  m.def("load_csv", &load_csv, py::arg("path"));
  m.def("parse_csv", &parse_csv, py::arg("text"), py::arg("source") = "inline");
  m.def("write_csv", &write_csv, py::arg("dataset"), py::arg("path"));
  m.def("generate_synthetic", &generate_synthetic, py::arg("count"), py::arg("min_n") = 20, py::arg("max_n") = 200,
        py::arg("seed") = 1, py::arg("timestamped") = false);

  py::class_<MeasureSpec>(m, "MeasureSpec")
      .def(py::init(&make_spec), py::arg("measure"), py::arg("eps") = py::none(), py::arg("eps_t") = py::none(),
           py::arg("gap") = py::none(), py::arg("sax_word") = py::none(), py::arg("sax_alphabet") = py::none(),
           py::arg("sax_threshold") = py::none())
      .def_property_readonly("name", [](const MeasureSpec& s) { return std::string(measure_name(s.kind)); })
      .def_property_readonly("larger_is_more_similar",
                             [](const MeasureSpec& s) { return larger_is_more_similar(s.kind); });

  m.def("measure_names", [] {
    std::vector<std::string> out;
    for (auto k : {MeasureKind::kSpd, MeasureKind::kCdds, MeasureKind::kSar, MeasureKind::kDtw,
                   MeasureKind::kFrechet, MeasureKind::kLcss, MeasureKind::kEdr, MeasureKind::kErp,
                   MeasureKind::kStedr, MeasureKind::kHausdorff, MeasureKind::kOwd}) {
      out.emplace_back(measure_name(k));
    }
    return out;
  });
  m.def("evaluate", &evaluate, py::arg("spec"), py::arg("a"), py::arg("b"));
  m.def(
      "par_evaluate",
      [](const MeasureSpec& spec, const Trajectory& a, const Trajectory& b, std::size_t workers_per_pair,
         const std::string& assignment, std::size_t threads) {
        ParallelConfig cfg = make_config(workers_per_pair, threads, assignment);
        py::gil_scoped_release release;
        return par_evaluate(spec, a, b, cfg);
      },
      py::arg("spec"), py::arg("a"), py::arg("b"), py::arg("workers_per_pair") = 64,
      py::arg("assignment") = "contiguous", py::arg("threads") = 0);
  m.def(
      "run_batch",
      [](const MeasureSpec& spec, const std::vector<std::pair<Trajectory, Trajectory>>& pairs, std::size_t workers,
         const std::string& engine, std::size_t workers_per_pair) {
        std::vector<TrajectoryPair> refs;
        for (const auto& [a, b] : pairs) refs.emplace_back(std::cref(a), std::cref(b));
        const ParallelConfig cfg = make_config(workers_per_pair, workers, "contiguous");
        BatchMode mode;
        if (engine == "pair_per_worker") {
          mode = BatchMode::kPairPerWorker;
        } else if (engine == "intra_pair") {
          mode = BatchMode::kIntraPair;
        } else {
          throw ParameterError("engine must be 'pair_per_worker' or 'intra_pair'");
        }
        py::gil_scoped_release release;
        return run_batch(spec, refs, cfg, mode).scores;
      },
      py::arg("spec"), py::arg("pairs"), py::arg("workers") = 0, py::arg("engine") = "pair_per_worker",
      py::arg("workers_per_pair") = 64);

  py::class_<FfnWeights>(m, "FfnWeights")
      .def_static("random", &FfnWeights::random, py::arg("d") = kDefaultDim, py::arg("L") = kDefaultInputLength,
                  py::arg("seed") = 1)
      .def_static("zeros", &FfnWeights::zeros, py::arg("d"), py::arg("L"))
      .def_readonly("d", &FfnWeights::d)
      .def_readonly("L", &FfnWeights::L)
      .def("save", [](const FfnWeights& w, const std::string& p) { save_weights(w, p); })
      .def_static("load", &load_weights);

  py::class_<Embedding>(m, "Embedding")
      .def(py::init([](std::string id, std::vector<double> v) { return Embedding{std::move(id), std::move(v)}; }),
           py::arg("id"), py::arg("vec"))
      .def_readonly("id", &Embedding::id)
      .def_readonly("vec", &Embedding::vec);

  m.def("ffn_encode", &ffn_encode, py::arg("trajectory"), py::arg("weights"));
  m.def("similarity", &similarity, py::arg("h"), py::arg("h2"));

  py::class_<EmbeddingStore>(m, "EmbeddingStore")
      .def(py::init<std::size_t>(), py::arg("d"))
      .def("add", &EmbeddingStore::add)
      .def("__len__", &EmbeddingStore::size)
      .def("__getitem__",
           [](const EmbeddingStore& s, std::size_t i) {
             if (i >= s.size()) throw py::index_error();
             return s[i];
           })
      .def_property_readonly("dim", &EmbeddingStore::dim)
      .def("__eq__", [](const EmbeddingStore& a, const EmbeddingStore& b) { return a == b; })
      .def("save", [](const EmbeddingStore& s, const std::string& p) { save_store(s, p); })
      .def_static("load", &load_store);

  m.def(
      "encode_dataset",
      [](const Dataset& ds, const FfnWeights& w, std::size_t workers) {
        py::gil_scoped_release release;
        return encode_dataset(ds, w, workers ? workers : default_worker_count());
      },
      py::arg("dataset"), py::arg("weights"), py::arg("workers") = 0);

  py::class_<FlatIndex>(m, "FlatIndex")
      .def(py::init([](const EmbeddingStore& s, const std::string& metric) { return FlatIndex(s, parse_metric(metric)); }),
           py::arg("store"), py::arg("metric") = "l2")
      .def("__len__", &FlatIndex::size)
      .def(
          "search",
          [](const FlatIndex& i, const std::vector<double>& q, std::size_t k) { return neighbors_list(knn_flat(i, q, k)); },
          py::arg("query"), py::arg("k"))
      .def("save", [](const FlatIndex& i, const std::string& dir) { save_index(i, dir); });

  py::class_<IvfIndex>(m, "IvfIndex")
      .def(py::init([](const EmbeddingStore& s, const std::string& metric, std::size_t nlist, std::size_t kmeans_iters,
                       std::uint64_t seed) {
             return IvfIndex(s, parse_metric(metric), IvfParams{nlist, 0, kmeans_iters, seed});
           }),
           py::arg("store"), py::arg("metric") = "l2", py::arg("nlist") = 0, py::arg("kmeans_iters") = 25,
           py::arg("seed") = 1)
      .def("__len__", &IvfIndex::size)
      .def_property_readonly("nlist", &IvfIndex::nlist)
      .def_property_readonly("nprobe_default", &IvfIndex::nprobe_default)
      .def("list_sizes",
           [](const IvfIndex& i) {
             std::vector<std::size_t> out;
             for (std::size_t c = 0; c < i.nlist(); ++c) out.push_back(i.list(c).size());
             return out;
           })
      .def(
          "search",
          [](const IvfIndex& i, const std::vector<double>& q, std::size_t k, std::optional<std::size_t> nprobe) {
            return neighbors_list(knn_ivf(i, q, k, nprobe.value_or(i.nprobe_default())));
          },
          py::arg("query"), py::arg("k"), py::arg("nprobe") = py::none())
      .def("save", [](const IvfIndex& i, const std::string& dir) { save_index(i, dir); });

  m.def("load_index", [](const std::string& dir) -> py::object {
    AnyIndex idx = load_index(dir);
    if (auto* f = std::get_if<FlatIndex>(&idx)) return py::cast(std::move(*f));
    return py::cast(std::move(std::get<IvfIndex>(idx)));
  });

  m.def(
      "knn_exact",
      [](const Dataset& D, const Trajectory& q, std::size_t k, const MeasureSpec& spec, std::size_t workers) {
        const ParallelConfig cfg = make_config(64, workers, "contiguous");
        KnnResult r;
        {
          py::gil_scoped_release release;
          r = knn_exact(D, q, k, spec, cfg);
        }
        return ranked_list(r);
      },
      py::arg("data"), py::arg("query"), py::arg("k"), py::arg("spec"), py::arg("workers") = 0);

  m.def(
      "hit_ratio",
      [](const std::vector<std::string>& approx, const std::vector<std::string>& truth, std::size_t k) {
        KnnResult a{"q", k, {}}, t{"q", k, {}};
        for (const auto& id : approx) a.neighbors.push_back({id, 0.0});
        for (const auto& id : truth) t.neighbors.push_back({id, 0.0});
        return hit_ratio(a, t);
      },
      py::arg("approx"), py::arg("truth"), py::arg("k"));

  py::class_<Clustering>(m, "Clustering")
      .def_readonly("k", &Clustering::k)
      .def_readonly("medoid_ids", &Clustering::medoid_ids)
      .def_readonly("assignment", &Clustering::assignment)
      .def_readonly("total_cost", &Clustering::total_cost)
      .def_readonly("cost_history", &Clustering::cost_history)
      .def_readonly("iterations", &Clustering::iterations);

  m.def(
      "kmedoids",
      [](const std::vector<std::string>& ids, const std::vector<std::vector<double>>& matrix, std::size_t k,
         std::uint64_t seed, std::size_t max_iters) {
        DistanceMatrix dm(ids.size());
        if (matrix.size() != ids.size()) throw ValidationError("matrix must be n x n");
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (matrix[i].size() != ids.size()) throw ValidationError("matrix must be n x n");
          for (std::size_t j = i + 1; j < ids.size(); ++j) dm.set(i, j, matrix[i][j]);
        }
        return kmedoids(ids, dm, k, seed, max_iters);
      },
      py::arg("ids"), py::arg("matrix"), py::arg("k"), py::arg("seed") = 1, py::arg("max_iters") = 100);

  m.def(
      "distance_matrix",
      [](const Dataset& D, const MeasureSpec& spec, std::size_t workers) {
        const ParallelConfig cfg = make_config(64, workers, "contiguous");
        DistanceMatrix dm;
        {
          py::gil_scoped_release release;
          dm = precompute_distance_matrix(D, spec, cfg);
        }
        std::vector<std::vector<double>> out(dm.size(), std::vector<double>(dm.size()));
        for (std::size_t i = 0; i < dm.size(); ++i) {
          for (std::size_t j = 0; j < dm.size(); ++j) out[i][j] = dm(i, j);
        }
        return out;
      },
      py::arg("data"), py::arg("spec"), py::arg("workers") = 0);

  m.def("rand_index",
        [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) { return rand_index(a, b); },
        py::arg("a"), py::arg("b"));
  m.def("pair_recall",
        [](const std::vector<std::size_t>& t, const std::vector<std::size_t>& p) { return pair_recall(t, p); },
        py::arg("truth"), py::arg("pred"));

  m.def(
      "validate_report",
      [](const std::string& text) { return validate_report(nlohmann::json::parse(text)); }, py::arg("text"));
}
