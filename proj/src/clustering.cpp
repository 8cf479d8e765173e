#include <algorithm>
#include <atomic>
#include <limits>
#include <random>

#include "trajsim/analytics.hpp"
#include "trajsim/errors.hpp"
#include "trajsim/exact_sum.hpp"
#include "trajsim/worker_team.hpp"

namespace trajsim {

DistanceMatrix precompute_distance_matrix(const Dataset& D, const MeasureSpec& spec, const ParallelConfig& cfg) {
  const std::size_t n = D.size();
  DistanceMatrix m(n);
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  std::vector<TrajectoryPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    if (larger_is_more_similar(spec.kind)) {
      idx.emplace_back(i, i);
      pairs.emplace_back(std::cref(D[i]), std::cref(D[i]));
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      idx.emplace_back(i, j);
      pairs.emplace_back(std::cref(D[i]), std::cref(D[j]));
    }
  }
  if (pairs.empty()) return m;
  BatchResult r;
  try {
    r = run_batch(spec, pairs, cfg, BatchMode::kPairPerWorker);
  } catch (const BatchError& e) {
    const auto [i, j] = idx[e.pair_index()];
    throw BatchError(e.pair_index(), "(" + std::to_string(i) + "," + std::to_string(j) + ") " + e.what());
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) m.set(idx[p].first, idx[p].second, r.scores[p]);
  return m;
}

DistanceMatrix embedding_distance_matrix(const EmbeddingStore& store, Metric metric, std::size_t workers) {
  const std::size_t n = store.size();
  DistanceMatrix m(n);
  if (n == 0) return m;
  WorkerTeam team(std::max<std::size_t>(1, std::min(workers, n)));
  std::atomic<std::size_t> next{0};
  team.run([&](std::size_t) {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, metric_distance(metric, store[i].vec, store[j].vec));
    }
  });
  return m;
}

namespace {

std::vector<std::size_t> seed_medoids(std::size_t n, std::size_t k, const DistanceFn& dist, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> medoids;
  std::vector<bool> chosen(n, false);
  auto take = [&](std::size_t i) {
    chosen[i] = true;
    medoids.push_back(i);
  };
  take(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (medoids.size() < k) {
    const std::size_t last = medoids.back();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) {
        nearest[i] = 0.0;
        continue;
      }
      nearest[i] = std::min(nearest[i], dist(i, last));
      total += nearest[i] * nearest[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] || nearest[i] <= 0.0) continue;
        acc += nearest[i] * nearest[i];
        pick = i;
        if (acc > target) break;
      }
    }
    if (pick == n) {
      std::vector<std::size_t> unused;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) unused.push_back(i);
      }
      pick = unused[std::uniform_int_distribution<std::size_t>(0, unused.size() - 1)(rng)];
    }
    take(pick);
  }
  return medoids;
}

}  // namespace

Clustering kmedoids(std::vector<std::string> items, const DistanceFn& dist, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters, std::size_t workers) {
  const std::size_t n = items.size();
  if (k == 0 || k > n) {
    throw ParameterError("k must be in [1, " + std::to_string(n) + "], got " + std::to_string(k));
  }
  if (max_iters == 0) throw ParameterError("max_iters must be >= 1");

  Clustering c;
  c.k = k;
  c.item_ids = std::move(items);
  c.medoids = seed_medoids(n, k, dist, seed);

  WorkerTeam team(std::max<std::size_t>(1, std::min(workers, n)));
  std::vector<std::size_t> assignment(n);
  std::vector<double> own(n);
  const Partition part(n, team.size(), Assignment::kContiguous);

  for (std::size_t it = 0; it < max_iters; ++it) {
    team.run([&](std::size_t w) {
      part.for_each(w, [&](std::size_t i) {
        std::size_t best = 0;
        double best_d = dist(i, c.medoids[0]);
        for (std::size_t m = 1; m < k; ++m) {
          const double d = dist(i, c.medoids[m]);
          if (d < best_d) {
            best_d = d;
            best = m;
          }
        }
        assignment[i] = best;
        own[i] = best_d;
      });
    });
    for (std::size_t m = 0; m < k; ++m) {
      assignment[c.medoids[m]] = m;
      own[c.medoids[m]] = 0.0;
    }
    ExactSum cost;
    for (double v : own) cost += v;
    c.cost_history.push_back(cost.value());
    c.iterations = it + 1;
    if (it > 0 && assignment == c.assignment) {
      c.converged = true;
      break;
    }
    c.assignment = assignment;
    if (it + 1 == max_iters) break;

    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < n; ++i) members[assignment[i]].push_back(i);
    for (std::size_t m = 0; m < k; ++m) {
      std::size_t best = c.medoids[m];
      double best_cost = std::numeric_limits<double>::infinity();
      for (std::size_t cand : members[m]) {
        ExactSum s;
        for (std::size_t o : members[m]) {
          if (o != cand) s += dist(cand, o);
        }
        const double v = s.value();
        if (v < best_cost || (v == best_cost && c.item_ids[cand] < c.item_ids[best])) {
          best_cost = v;
          best = cand;
        }
      }
      c.medoids[m] = best;
    }
  }
  c.assignment = assignment;
  c.total_cost = c.cost_history.back();
  c.medoid_ids.clear();
  for (std::size_t m : c.medoids) c.medoid_ids.push_back(c.item_ids[m]);
  return c;
}

Clustering kmedoids(std::vector<std::string> items, const DistanceMatrix& m, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters, std::size_t workers) {
  if (m.size() != items.size()) throw ValidationError("distance matrix size does not match the item count");
  return kmedoids(std::move(items), [&m](std::size_t i, std::size_t j) { return i == j ? 0.0 : m(i, j); }, k, seed,
                  max_iters, workers);
}

double rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw ValidationError("rand index needs labelings of the same items");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) agree += (a[i] == a[j]) == (b[i] == b[j]);
  }
  return static_cast<double>(agree) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

double rand_index(const Clustering& a, const Clustering& b) {
  if (a.item_ids != b.item_ids) throw ValidationError("rand index needs clusterings of the same items");
  return rand_index(a.assignment, b.assignment);
}

double pair_recall(std::span<const std::size_t> truth, std::span<const std::size_t> pred) {
  if (truth.size() != pred.size()) throw ValidationError("pair recall needs labelings of the same items");
  std::size_t pos = 0, hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t j = i + 1; j < truth.size(); ++j) {
      if (truth[i] != truth[j]) continue;
      ++pos;
      hit += pred[i] == pred[j];
    }
  }
  return pos == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(pos);
}

std::string format_distance_matrix(const DistanceMatrix& m) {
  std::string out = "i,j,value\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      out += std::to_string(i) + "," + std::to_string(j) + "," + format_double(m(i, j)) + "\n";
    }
  }
  return out;
}

std::string format_clustering(const Clustering& c) {
  std::string out = "id,cluster\n";
  for (std::size_t i = 0; i < c.item_ids.size(); ++i) {
    out += c.item_ids[i] + "," + std::to_string(c.assignment[i]) + "\n";
  }
  return out;
}

}  // namespace trajsim
