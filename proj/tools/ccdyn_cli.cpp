// Command-line front end: one-shot static runs, stream replay, adversary
// generation, the exact oracle, invariant suites, and config-driven
// experiments. All randomness roots in --seed; identical invocations emit
// byte-identical metrics.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "ccdyn/adversary.hpp"
#include "ccdyn/cluster_lp.hpp"
#include "ccdyn/engine.hpp"
#include "ccdyn/experiment.hpp"
#include "ccdyn/local_search.hpp"
#include "ccdyn/oracle.hpp"
#include "ccdyn/pivot.hpp"
#include "ccdyn/plugins.hpp"
#include "ccdyn/preclustering.hpp"
#include "ccdyn/reconcile.hpp"

using namespace ccdyn;

namespace {

struct GlobalOpts {
  uint64_t seed = 1;
  double epsilon = 0.1;
  std::optional<double> mu;
  std::string pipeline = "pivot";
  std::string mode = "amortized";
  std::string metrics_path;
};

void write_metrics(const MetricsSink& sink, const std::string& path) {
  if (path.empty() || path == "-")
    std::cout << sink.serialize();
  else
    sink.write_file(path);
}

int cmd_static(const GlobalOpts& g, const std::string& graph_path, const std::string& out_path) {
  Graph graph = read_edge_list_file(graph_path);
  ClusterRepresentation rep = ClusterRepresentation::singletons(graph);
  StaticPipelineParams params;
  params.eps = g.epsilon;
  auto pipeline = make_pipeline(g.pipeline, params, std::make_shared<OptOracle>());
  RngStream rng(g.seed, 0);
  ClusterRepresentation cur = rep;
  for (auto& plugin : pipeline) {
    PluginResult out = plugin.run(cur, rng);
    const ClusterRepresentation& keep = best_of(cur, out.rep, TieRule::KeepSecond);
    if (&keep == &out.rep) cur = std::move(out.rep);
  }
  std::cout << "n " << graph.n() << " m " << graph.m() << " cost " << cur.cost() << "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    write_representation(cur, f);
  }
  return 0;
}

int cmd_dynamic(const GlobalOpts& g, const std::string& graph_path, const std::string& stream_path,
                bool with_oracle) {
  ExperimentConfig cfg;
  cfg.graph_source = graph_path.empty() ? "empty" : "file";
  cfg.graph_path = graph_path;
  cfg.adversary = "replay";
  cfg.stream_path = stream_path;
  cfg.epsilon = g.epsilon;
  cfg.mu = g.mu;
  cfg.mode = g.mode;
  cfg.pipeline = g.pipeline;
  cfg.seed = g.seed;
  cfg.oracle = with_oracle;
  if (cfg.graph_source == "empty") {
    // Vertex count from the stream's largest endpoint.
    UpdateStream s = read_stream_file(stream_path);
    int32_t n = 1;
    for (const UpdateOp& op : s) n = std::max({n, op.u + 1, op.v + 1});
    cfg.n = n;
  }
  ExperimentResult res = run_experiment(cfg);
  write_metrics(res.metrics, g.metrics_path);
  return res.assertions_ok ? 0 : 1;
}

int cmd_adversary(const GlobalOpts& g, const std::string& kind, int32_t n, int32_t T, double p,
                  const std::string& out_path, bool live, const std::string& graph_path) {
  if (live) {
    ExperimentConfig cfg;
    cfg.graph_source = kind == "twoPaths" ? "twoPaths" : "gnp";
    cfg.n = n;
    cfg.p_edge = p;
    cfg.adversary = kind;
    cfg.updates = T;
    cfg.epsilon = g.epsilon;
    cfg.mu = g.mu;
    cfg.mode = g.mode;
    cfg.pipeline = g.pipeline;
    cfg.seed = g.seed;
    cfg.oracle = n <= 16 || kind == "twoPaths";
    ExperimentResult res = run_experiment(cfg);
    write_metrics(res.metrics, g.metrics_path);
    return res.assertions_ok ? 0 : 1;
  }
  UpdateStream stream;
  if (kind == "twoPaths") {
    stream = adversary_two_paths(n).stream;
  } else if (kind == "obliviousRandom") {
    RngStream rng(g.seed, 17);
    // Annotations match the given initial graph (empty without --graph).
    Graph initial = graph_path.empty() ? Graph(n) : read_edge_list_file(graph_path);
    stream = adversary_oblivious_random(initial, T, rng);
  } else {
    std::cerr << "adversary: unknown kind " << kind << " (twoPaths|obliviousRandom)\n";
    return 2;
  }
  if (out_path.empty() || out_path == "-")
    write_stream(stream, std::cout);
  else {
    std::ofstream f(out_path);
    write_stream(stream, f);
  }
  return 0;
}

int cmd_oracle(const std::string& graph_path) {
  Graph graph = read_edge_list_file(graph_path);
  if (graph.n() > 16) {
    std::cerr << "oracle: exact optimum supports n <= 16 (got n = " << graph.n() << ")\n";
    return 2;
  }
  OptResult opt = brute_force_opt(graph);
  std::cout << "opt_cost " << opt.cost << "\n";
  auto labels = opt.clustering.dense_labels();
  for (size_t v = 0; v < labels.size(); ++v) std::cout << labels[v] << (v + 1 == labels.size() ? '\n' : ' ');
  return 0;
}

// Quick randomized invariant suites; exit code 0 iff all hold.
int cmd_verify(const GlobalOpts& g, int32_t trials) {
  RngStream rng(g.seed, 99);
  int failures = 0;
  auto check = [&](bool ok, const std::string& name) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };

  {  // violation oracle vs cost oracle; reconcile round-trips
    bool ok = true;
    for (int32_t t = 0; t < trials && ok; ++t) {
      Graph graph = Graph::gnp(10, 0.4, rng);
      std::vector<ClusterId> lab(10);
      for (auto& l : lab) l = static_cast<ClusterId>(rng.uniform_int(3));
      Clustering c = Clustering::from_labels(lab);
      ok = ok && static_cast<int64_t>(violation(graph, c).size()) == clustering_cost(graph, c);
      ClusterRepresentation rep = ClusterRepresentation::from(graph, c);
      UpdateBuffer buf(10);
      Graph mutated = graph;
      for (int32_t i = 0; i < 50; ++i) {
        VertexId u = static_cast<VertexId>(rng.uniform_int(10));
        VertexId v = static_cast<VertexId>(rng.uniform_int(9));
        if (v >= u) ++v;
        mutated.flip_edge(u, v);
        buf.record(u, v);
      }
      apply_flips(rep, buf);
      ok = ok && rep.cost() == clustering_cost(mutated, rep.clustering);
    }
    check(ok, "violation accounting under random flips");
  }
  {  // pivot never splits cores; distribution sanity by cost mean
    bool ok = true;
    for (int32_t t = 0; t < trials && ok; ++t) {
      Graph graph = Graph::gnp(9, 0.5, rng);
      ClusterRepresentation rep = ClusterRepresentation::singletons(graph);
      PivotOutput po = pivot_cluster(rep, rng);
      ok = ok && clustering_cost(graph, po.clustering) ==
                     symmetric_difference_full(rep, po.clustering, po.move_log).rep.violation.size();
    }
    check(ok, "pivot output matches the violation oracle");
  }
  {  // cleaning guarantees
    bool ok = true;
    for (int32_t t = 0; t < trials && ok; ++t) {
      Graph graph = Graph::gnp(20, 0.3, rng);
      std::vector<ClusterId> lab(20);
      for (auto& l : lab) l = static_cast<ClusterId>(rng.uniform_int(4));
      ClusterRepresentation rep = ClusterRepresentation::from(graph, Clustering::from_labels(lab));
      CleanResult cl = clean(rep);
      ok = ok && cl.rep.cost() <= kCleanCostFactor * std::max<int64_t>(rep.cost(), 0);
      for (ClusterId c = 0; c < cl.rep.clustering.cluster_ids() && ok; ++c) {
        if (cl.rep.clustering.size(c) <= 1) continue;
        auto mem = cl.rep.clustering.members(c);
        ok = ok && is_agreeing(mem, graph, 2.0 / 19.0 + 1e-12);
      }
    }
    check(ok, "cleaning produces strong clusters within the cost factor");
  }
  {  // engine with exact plugin stays within (1+eps) on two-path streams
    bool ok = true;
    TwoPathsScript sc = adversary_two_paths(9);
    auto oracle = std::make_shared<OptOracle>();
    EngineConfig ec;
    ec.epsilon = g.epsilon;
    ec.seed = g.seed;
    MetricsSink sink;
    Engine engine(sc.initial, sc.initial_clustering, {make_exact_plugin(oracle)}, ec, &sink);
    int64_t i = 0;
    for (const UpdateOp& op : sc.stream) {
      engine.delete_edge(op.u, op.v);
      ++i;
      auto cost = engine.current_cost();
      int64_t opt = sc.opt_cost_after(i);
      ok = ok && cost && static_cast<double>(*cost) <= (1 + ec.epsilon) * static_cast<double>(opt) + 1e-9;
    }
    check(ok, "exact-plugin engine tracks the optimum on deletion streams");
  }
  std::cout << (failures == 0 ? "verify: all suites passed\n" : "verify: failures detected\n");
  return failures == 0 ? 0 : 1;
}

int cmd_experiment(const GlobalOpts& g, const std::string& config_path) {
  ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
  ExperimentResult res = run_experiment(cfg);
  write_metrics(res.metrics, g.metrics_path);
  return res.assertions_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fully-dynamic correlation clustering driver"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts g;
  app.add_option("--seed", g.seed, "root random seed");
  app.add_option("--epsilon", g.epsilon, "approximation slack");
  double mu_val = -1;
  app.add_option("--mu", mu_val, "rebuild fraction override");
  app.add_option("--pipeline", g.pipeline,
                 "pivot|localsearch|clusterlp|mixed|exact|hypothetical|identity");
  app.add_option("--mode", g.mode, "amortized|deamortized");
  app.add_option("--metrics", g.metrics_path, "metrics output path (JSONL; '-' for stdout)");

  std::string graph_path, stream_path, out_path, config_path, adv_kind = "obliviousRandom";
  int32_t n = 9, T = 100, trials = 50;
  double p = 0.5;
  bool with_oracle = false, live = false;

  auto* s_static = app.add_subcommand("static", "one-shot algorithm on an edge list");
  s_static->add_option("graph", graph_path, "edge-list file")->required();
  s_static->add_option("--out", out_path, "write the resulting representation");

  auto* s_dyn = app.add_subcommand("dynamic", "replay an update stream");
  s_dyn->add_option("stream", stream_path, "update-stream file")->required();
  s_dyn->add_option("--graph", graph_path, "initial edge-list file (default: empty graph)");
  s_dyn->add_flag("--oracle", with_oracle, "attach the exact-opt metrics provider (n <= 16)");

  auto* s_adv = app.add_subcommand("adversary", "generate or live-drive an adversary");
  s_adv->add_option("kind", adv_kind, "twoPaths|obliviousRandom|adaptiveGreedy")->required();
  s_adv->add_option("--n", n, "vertex count");
  s_adv->add_option("--T", T, "update count");
  s_adv->add_option("--p", p, "edge probability for random initial graphs");
  s_adv->add_option("--out", out_path, "stream output path ('-' for stdout)");
  s_adv->add_option("--graph", graph_path, "initial edge-list the annotations run against");
  s_adv->add_flag("--live", live, "drive an engine instead of writing a stream");

  auto* s_oracle = app.add_subcommand("oracle", "exact optimum of an edge list (n <= 16)");
  s_oracle->add_option("graph", graph_path, "edge-list file")->required();

  auto* s_verify = app.add_subcommand("verify", "run the invariant suites");
  s_verify->add_option("--trials", trials, "randomized trials per suite");

  auto* s_exp = app.add_subcommand("experiment", "run a config-driven experiment");
  s_exp->add_option("config", config_path, "JSON config file")->required();

  CLI11_PARSE(app, argc, argv);
  if (mu_val > 0) g.mu = mu_val;

  try {
    if (s_static->parsed()) return cmd_static(g, graph_path, out_path);
    if (s_dyn->parsed()) return cmd_dynamic(g, graph_path, stream_path, with_oracle);
    if (s_adv->parsed()) return cmd_adversary(g, adv_kind, n, T, p, out_path, live, graph_path);
    if (s_oracle->parsed()) return cmd_oracle(graph_path);
    if (s_verify->parsed()) return cmd_verify(g, trials);
    if (s_exp->parsed()) return cmd_experiment(g, config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
