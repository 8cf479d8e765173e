#include <doctest.h>

#include <algorithm>
#include <map>

#include "oracles.hpp"
#include "trajsim/analytics.hpp"
#include "trajsim/errors.hpp"

using namespace trajsim;

namespace {

Trajectory xy(std::initializer_list<std::pair<double, double>> pts, const std::string& id) {
  std::vector<Point> v;
  for (auto [x, y] : pts) v.push_back({x, y, std::nullopt});
  return Trajectory(id, v);
}

ParallelConfig cfg(std::size_t batch = 2) {
  ParallelConfig c;
  c.workers_per_pair = 2;
  c.batch_workers = batch;
  return c;
}

KnnResult knn_of(std::string q, std::vector<std::string> names) {
  KnnResult r{std::move(q), names.size(), {}};
  for (auto& n : names) r.neighbors.push_back({n, 0.0});
  return r;
}

// Single-threaded ranking reference: all scores, sorted by orientation then id.
KnnResult naive_knn(const Dataset& D, const Trajectory& q, std::size_t k, const MeasureSpec& spec) {
  std::vector<Ranked> all;
  for (const auto& t : D.trajectories()) all.push_back({t.id(), evaluate(spec, q, t)});
  const bool desc = larger_is_more_similar(spec.kind);
  std::sort(all.begin(), all.end(), [&](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return desc ? a.score > b.score : a.score < b.score;
    return a.id < b.id;
  });
  all.resize(k);
  return KnnResult{q.id(), k, all};
}

}  // namespace

TEST_CASE("knn_exact on four tiny trajectories under hausdorff") {
  const Dataset D({xy({{0, 0}, {1, 0}}, "a"), xy({{0, 1}, {1, 1}}, "b"), xy({{0, 3}}, "c"),
                   xy({{10, 10}, {11, 10}}, "d")});
  const auto q = xy({{0, 0.5}}, "q");
  const auto spec = MeasureSpec::with_defaults(MeasureKind::kHausdorff);
  // Hand distances: a = sqrt(1.25), b = sqrt(1.25), c = 2.5, d far away.
  const auto r = knn_exact(D, q, 2, spec, cfg());
  REQUIRE(r.neighbors.size() == 2);
  CHECK(r.neighbors[0].id == "a");
  CHECK(r.neighbors[1].id == "b");
  CHECK(r.neighbors[0].score == doctest::Approx(std::sqrt(1.25)));
  const auto full = knn_exact(D, q, 4, spec, cfg());
  CHECK(full.neighbors[2].id == "c");
  CHECK(full.neighbors[2].score == 2.5);
  CHECK(full.neighbors[3].id == "d");
  CHECK_THROWS_AS(knn_exact(D, q, 5, spec, cfg()), ParameterError);
  CHECK_THROWS_AS(knn_exact(D, q, 0, spec, cfg()), ParameterError);
}

TEST_CASE("query in the data ranks first") {
  const Dataset D = generate_synthetic(30, 3, 20, 61, false);
  const auto r = knn_exact(D, D[7], 5, MeasureSpec::with_defaults(MeasureKind::kDtw), cfg());
  CHECK(r.neighbors[0].id == D[7].id());
  CHECK(r.neighbors[0].score == 0.0);
}

TEST_CASE("knn_exact agrees with a naive ranking for every measure") {
  const Dataset D = generate_synthetic(40, 2, 15, 62, true);
  const Dataset Q = generate_synthetic(3, 2, 15, 63, true);
  for (auto kind : {MeasureKind::kCdds, MeasureKind::kSar, MeasureKind::kDtw, MeasureKind::kFrechet,
                    MeasureKind::kLcss, MeasureKind::kEdr, MeasureKind::kErp, MeasureKind::kStedr,
                    MeasureKind::kHausdorff, MeasureKind::kOwd}) {
    const auto spec = MeasureSpec::with_defaults(kind);
    for (const auto& q : Q.trajectories()) {
      for (auto mode : {BatchMode::kIntraPair, BatchMode::kPairPerWorker}) {
        CHECK(knn_exact(D, q, 10, spec, cfg(3), mode) == naive_knn(D, q, 10, spec));
      }
    }
  }
}

TEST_CASE("hit ratio") {
  const auto a = knn_of("q", {"1", "2", "3", "4"});
  CHECK(hit_ratio(a, a) == 1.0);
  CHECK(hit_ratio(a, knn_of("q", {"5", "6", "7", "8"})) == 0.0);
  const auto b = knn_of("q", {"2", "9", "4", "8"});
  CHECK(hit_ratio(a, b) == 0.5);
  CHECK(hit_ratio(b, a) == 0.5);
  std::vector<std::string> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back("x" + std::to_string(i));
    y.push_back(i < 25 ? x.back() : "y" + std::to_string(i));
  }
  CHECK(hit_ratio(knn_of("q", x), knn_of("q", y)) == 0.5);
  CHECK_THROWS_AS(hit_ratio(a, knn_of("q", {"1"})), ParameterError);
  CHECK_THROWS_AS(hit_ratio(a, knn_of("p", {"1", "2", "3", "4"})), ParameterError);
}

TEST_CASE("embedding knn") {
  const Dataset D = generate_synthetic(80, 5, 40, 64, false);
  const auto w = FfnWeights::random(16, 40, 2);
  const auto store = encode_dataset(D, w, 2);
  const auto flat = build_flat(store, Metric::kL2);
  const auto ivf = build_ivf(store, Metric::kL2, 9, 25, 1);
  const auto r = knn_embedding(flat, w, D[3], 10);
  CHECK(r.result.neighbors[0].id == D[3].id());
  CHECK(r.result.neighbors[0].score == 0.0);
  CHECK(r.timing.emb_s >= 0.0);
  CHECK(r.timing.cmp_s >= 0.0);
  const auto ri = knn_embedding(ivf, w, D[3], 10, 9);
  CHECK(ri.result == r.result);
  const auto oracle_r = to_knn_result(D[3].id(), 10, knn_flat(flat, store[3].vec, 10));
  CHECK(hit_ratio(r.result, oracle_r) == 1.0);
  CHECK_THROWS_AS(knn_embedding(flat, FfnWeights::random(8, 40, 2), D[3], 10), ValidationError);
}

TEST_CASE("distance matrix") {
  const Dataset D({xy({{0, 0}, {2, 0}}, "a"), xy({{0, 0}, {1, 0}, {2, 0}}, "b"), xy({{3, 4}}, "c")});
  const auto spec = MeasureSpec::with_defaults(MeasureKind::kDtw);
  const auto m = precompute_distance_matrix(D, spec, cfg());
  REQUIRE(m.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(m(i, i) == 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(m(i, j) == m(j, i));
      if (i != j) CHECK(m(i, j) == dtw(D[std::min(i, j)], D[std::max(i, j)]));
    }
  }
  CHECK(m(0, 1) == 1.0);
  CHECK(format_distance_matrix(m).rfind("i,j,value\n0,1,1\n", 0) == 0);

  const Dataset bad({xy({{0, 0}}, "a"), xy({{0, 0}, {1, 1}}, "b"), xy({{1, 1}}, "c")});
  try {
    precompute_distance_matrix(bad, MeasureSpec::with_defaults(MeasureKind::kSpd), cfg());
    FAIL("expected BatchError");
  } catch (const BatchError& e) {
    CHECK(std::string(e.what()).find("(0,1)") != std::string::npos);
  }
}

TEST_CASE("kmedoids with k equal to n") {
  const std::vector<std::string> items{"a", "b", "c", "d"};
  DistanceMatrix m(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) m.set(i, j, 1.0 + static_cast<double>(i + j));
  const auto c = kmedoids(items, m, 4, 1);
  CHECK(c.total_cost == 0.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(c.medoids[c.assignment[i]] == i);
  CHECK_THROWS_AS(kmedoids(items, m, 5, 1), ParameterError);
  CHECK_THROWS_AS(kmedoids(items, m, 0, 1), ParameterError);
}

TEST_CASE("kmedoids recovers two separated groups") {
  std::vector<Trajectory> ts;
  for (int i = 0; i < 5; ++i) ts.push_back(xy({{0, 0}, {1, 1}}, "g" + std::to_string(i)));
  for (int i = 0; i < 5; ++i) ts.push_back(xy({{100, 100}, {101, 101}}, "h" + std::to_string(i)));
  const Dataset D(ts);
  const auto m = precompute_distance_matrix(D, MeasureSpec::with_defaults(MeasureKind::kDtw), cfg());
  std::vector<std::string> ids;
  for (const auto& t : D.trajectories()) ids.push_back(t.id());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = kmedoids(ids, m, 2, seed);
    CHECK(c.total_cost == 0.0);
    const std::vector<std::size_t> planted{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    CHECK(rand_index(planted, c.assignment) == 1.0);
    CHECK(c.medoids[c.assignment[0]] < 5);
    CHECK(c.medoids[c.assignment[9]] >= 5);
  }
}

TEST_CASE("kmedoids cost never increases and is deterministic") {
  oracle::Gen gen(65);
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = gen.size(5, 40);
    std::vector<std::pair<double, double>> pts(n);
    for (auto& p : pts) p = {gen.real(0, 10), gen.real(0, 10)};
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
    const DistanceFn f = [&](std::size_t i, std::size_t j) {
      return std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
    };
    const std::size_t k = gen.size(1, std::min<std::size_t>(n, 6));
    const auto c = kmedoids(ids, f, k, inst, 100, 3);
    for (std::size_t i = 1; i < c.cost_history.size(); ++i) CHECK(c.cost_history[i] <= c.cost_history[i - 1]);
    CHECK(c == kmedoids(ids, f, k, inst, 100, 1));
    // Cost matches a direct sum over the final assignment.
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) total += f(i, c.medoids[c.assignment[i]]);
    CHECK(c.total_cost == doctest::Approx(total).epsilon(1e-12));
    for (std::size_t q = 0; q < k; ++q) CHECK(c.assignment[c.medoids[q]] == q);
    CHECK(c.iterations <= 100);
  }
}

TEST_CASE("rand index cases") {
  const std::vector<std::size_t> a{1, 1, 2, 2};
  const std::vector<std::size_t> b{1, 2, 1, 2};
  const std::vector<std::size_t> perm{2, 2, 1, 1};
  CHECK(rand_index(a, a) == 1.0);
  CHECK(rand_index(a, perm) == 1.0);
  CHECK(rand_index(a, b) == 2.0 / 6.0);
  CHECK(rand_index(b, a) == 2.0 / 6.0);
  CHECK_THROWS_AS(rand_index(a, std::vector<std::size_t>{1, 2}), ValidationError);
  CHECK(pair_recall(a, a) == 1.0);
  CHECK(pair_recall(a, b) == 0.0);
  CHECK(pair_recall(std::vector<std::size_t>{0, 1, 2}, std::vector<std::size_t>{0, 0, 0}) == 1.0);
}

TEST_CASE("rand index equals one exactly for the same partition") {
  oracle::Gen gen(66);
  for (int it = 0; it < 100; ++it) {
    const std::size_t n = gen.size(2, 12);
    std::vector<std::size_t> a(n), b(n);
    for (auto& v : a) v = gen.size(0, 3);
    for (auto& v : b) v = gen.size(0, 3);
    CHECK(rand_index(a, b) == rand_index(b, a));
    std::vector<std::size_t> relabel(n);
    for (std::size_t i = 0; i < n; ++i) relabel[i] = 7 - a[i];
    CHECK(rand_index(a, relabel) == 1.0);
    bool same = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) same = same && ((a[i] == a[j]) == (b[i] == b[j]));
    CHECK((rand_index(a, b) == 1.0) == same);
  }
}

TEST_CASE("csv outputs") {
  KnnResult r{"q", 2, {{"a", 0.5}, {"b", 1.0}}};
  CHECK(format_knn(std::vector<KnnResult>{r}) == "query_id,rank,id,score\nq,1,a,0.5\nq,2,b,1\n");
  Clustering c;
  c.item_ids = {"x", "y"};
  c.assignment = {1, 0};
  CHECK(format_clustering(c) == "id,cluster\nx,1\ny,0\n");
}
