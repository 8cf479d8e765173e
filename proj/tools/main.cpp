#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace trajsim::cli;

namespace {

void add_data(CLI::App* c, DataOptions& d) {
  c->add_option("--data", d.data, "Trajectory CSV (traj_id,x,y[,t])");
  c->add_option("--synthetic", d.synthetic, "Generate this many random-walk trajectories instead");
  c->add_option("--n-range", d.n_range, "Point count range for --synthetic, as min,max")->capture_default_str();
  c->add_flag("--timestamped", d.timestamped, "Add timestamps to --synthetic trajectories");
  c->add_option("--seed", d.seed, "Seed for generation and sampling")->capture_default_str();
}

void add_measure(CLI::App* c, MeasureOptions& m) {
  c->add_option("--measure", m.measure,
                "spd|cdds|sar|dtw|frechet|lcss|edr|erp|stedr|hausdorff|owd")
      ->capture_default_str();
  c->add_option("--eps", m.eps, "Spatial threshold (lcss, edr, stedr, cdds)");
  c->add_option("--eps-t", m.eps_t, "Temporal threshold in seconds (stedr)");
  c->add_option("--gap-x", m.gap_x, "ERP gap point x");
  c->add_option("--gap-y", m.gap_y, "ERP gap point y");
  c->add_option("--sax-word", m.sax_word, "SAX word length (sar)");
  c->add_option("--sax-alphabet", m.sax_alphabet, "SAX alphabet size (sar)");
  c->add_option("--sax-threshold", m.sax_threshold, "SAX symbol distance threshold (sar)");
}

void add_run(CLI::App* c, RunOptions& r, std::size_t default_reps) {
  r.reps = default_reps;
  c->add_option("--workers", r.workers, "Worker threads (default: TRAJSIM_WORKERS or all cores)");
  c->add_option("--workers-per-pair", r.workers_per_pair, "Logical workers per trajectory pair")
      ->capture_default_str();
  c->add_option("--assignment", r.assignment, "contiguous|interleaved")->capture_default_str();
  c->add_option("--reps", r.reps, "Repetitions; the report holds their mean")->capture_default_str();
  c->add_option("--timeout-s", r.timeout_s, "Abort and record OT after this many seconds");
  c->add_option("--out", r.out, "Output directory")->capture_default_str();
  c->add_option("--report", r.report, "Report path (default <out>/report.json)");
}

void add_weights(CLI::App* c, WeightOptions& w) {
  c->add_option("--weights", w.weights, "Encoder weights file");
  c->add_option("--weights-seed", w.weights_seed, "Generate encoder weights from this seed");
  c->add_option("--d", w.d, "Embedding dimension")->capture_default_str();
  c->add_option("--input-length", w.input_length, "Points fed to the encoder")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory similarity benchmark tool"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Write a synthetic trajectory dataset");
  g->add_option("--count", gen.count, "Number of trajectories")->capture_default_str();
  g->add_option("--n-range", gen.n_range, "Point count range, as min,max")->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_flag("--timestamped", gen.timestamped, "Add a monotone t column");
  g->add_option("--out", gen.out, "Output CSV")->capture_default_str();

  SimOptions sim;
  auto* s = app.add_subcommand("sim", "Pairwise similarity benchmark");
  add_data(s, sim.data);
  add_measure(s, sim.measure);
  add_run(s, sim.run, 5);
  s->add_option("--pairs", sim.pairs, "Sampled pairs")->capture_default_str();
  s->add_option("--mode", sim.mode, "single|batched")->capture_default_str();
  s->add_option("--engine", sim.engine, "Batched engine: pair_per_worker|intra_pair")->capture_default_str();
  s->add_option("--batch-size", sim.batch_size, "Pairs per batch")->capture_default_str();

  KnnOptions knn;
  auto* k = app.add_subcommand("knn", "kNN query benchmark");
  add_data(k, knn.data);
  add_measure(k, knn.measure);
  add_run(k, knn.run, 5);
  add_weights(k, knn.weights);
  k->add_option("--query-data", knn.query_data, "Query CSV (default: sample queries out of the data)");
  k->add_option("--queries", knn.queries, "Queries sampled out of the data")->capture_default_str();
  k->add_option("--k", knn.k, "Neighbors per query")->capture_default_str();
  k->add_option("--index", knn.index, "flat|ivf")->capture_default_str();
  k->add_option("--index-dir", knn.index_dir, "Reuse an index written by the index command");
  k->add_option("--metric", knn.metric, "l1|l2")->capture_default_str();
  k->add_option("--nlist", knn.nlist, "IVF lists (default round(sqrt N))");
  k->add_option("--nprobe", knn.nprobe, "IVF lists probed (default max(1, nlist/10))");
  k->add_option("--kmeans-iters", knn.kmeans_iters)->capture_default_str();
  k->add_flag("--truth-only", knn.truth_only, "Only compute the exact kNN of the measure");
  k->add_option("--engine", knn.engine, "Ground-truth engine: pair_per_worker|intra_pair")->capture_default_str();

  ClusterOptions cl;
  auto* c = app.add_subcommand("cluster", "k-medoids clustering benchmark");
  add_data(c, cl.data);
  add_measure(c, cl.measure);
  add_run(c, cl.run, 5);
  add_weights(c, cl.weights);
  c->add_option("--k", cl.k, "Clusters")->capture_default_str();
  c->add_option("--source", cl.source, "raw|embedding|both|auto")->capture_default_str();
  c->add_option("--metric", cl.metric, "Embedding distance: l1|l2")->capture_default_str();
  c->add_option("--max-iters", cl.max_iters)->capture_default_str();
  c->add_flag("--save-matrix", cl.save_matrix, "Write the raw distance matrix as CSV");

  EmbedOptions em;
  auto* e = app.add_subcommand("embed", "Encode a dataset into embeddings");
  add_data(e, em.data);
  add_run(e, em.run, 1);
  add_weights(e, em.weights);
  e->add_option("--save-weights", em.save_weights, "Also write the weights used");

  IndexOptions ix;
  auto* i = app.add_subcommand("index", "Build and persist a vector index");
  add_run(i, ix.run, 1);
  i->add_option("--embeddings", ix.embeddings, "Embedding CSV")->required();
  i->add_option("--index", ix.index, "flat|ivf")->capture_default_str();
  i->add_option("--metric", ix.metric, "l1|l2")->capture_default_str();
  i->add_option("--nlist", ix.nlist, "IVF lists (default round(sqrt N))");
  i->add_option("--nprobe", ix.nprobe, "Default IVF probes (default max(1, nlist/10))");
  i->add_option("--kmeans-iters", ix.kmeans_iters)->capture_default_str();
  i->add_option("--seed", ix.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : 2;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*s) return cmd_sim(sim);
    if (*k) return cmd_knn(knn);
    if (*c) return cmd_cluster(cl);
    if (*e) return cmd_embed(em);
    if (*i) return cmd_index(ix);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return 2;
  } catch (const trajsim::ParameterError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}
