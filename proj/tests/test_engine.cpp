#include <doctest.h>

#include <memory>

#include "ccdyn/adversary.hpp"
#include "ccdyn/engine.hpp"
#include "ccdyn/oracle.hpp"
#include "ccdyn/plugins.hpp"
#include "support/corpus.hpp"

using namespace ccdyn;

namespace {

std::shared_ptr<OptOracle> oracle() {
  static auto o = std::make_shared<OptOracle>();
  return o;
}

Engine make_engine(Graph g, Clustering c, const std::string& pipeline, EngineConfig cfg,
                   MetricsSink* sink = nullptr) {
  double ch = 0;
  pipeline_targets(pipeline, cfg.c, ch);
  cfg.c_hat = ch;
  return Engine(std::move(g), std::move(c), make_pipeline(pipeline, {}, oracle()), cfg, sink);
}

}  // namespace

TEST_CASE("flip bookkeeping") {
  SUBCASE("insert inside a cluster removes a violation; annotated cost is exact") {
    Graph g(4);
    g.add_edge(0, 1);
    EngineConfig cfg;
    cfg.mu_override = 1e-9;  // countdown floor 1: rebuild every update
    Engine e = make_engine(g, Clustering::one_cluster(4), "identity", cfg);
    REQUIRE(e.current_cost() == 5);  // missing pairs in the 4-cluster
    e.insert_edge(2, 3);
    CHECK(e.current_cost() == 4);
    CHECK(e.graph().has_edge(2, 3));
  }
  SUBCASE("double flip within an epoch cancels at reconcile") {
    Graph g(6);
    EngineConfig cfg;
    cfg.mu_override = 0.5;
    Engine e = make_engine(g, Clustering::singletons(6), "identity", cfg);
    e.flip(0, 1);
    e.flip(0, 1);
    e.force_rebuild();
    CHECK(e.reconciled_violation() == 0);
    CHECK(e.current_cost() == 0);
  }
  SUBCASE("self-pairs and mis-annotations are rejected") {
    Graph g(4);
    g.add_edge(0, 1);
    Engine e = make_engine(g, Clustering::singletons(4), "identity", {});
    CHECK_THROWS_AS(e.flip(1, 1), std::invalid_argument);
    CHECK_THROWS_AS(e.insert_edge(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(e.delete_edge(2, 3), std::invalid_argument);
  }
  SUBCASE("unannotated flips turn cost tracking into the unknown sentinel") {
    RngStream rng(9, 9);
    Graph g = Graph::gnp(8, 0.5, rng);
    EngineConfig cfg;
    cfg.epsilon = 0.5;
    Engine e = make_engine(g, Clustering::singletons(8), "identity", cfg);
    e.flip(0, 1);  // first update rebuilds and reconciles
    CHECK(e.current_cost().has_value());
    if (e.reconciled_violation() > 6) {  // countdown above 1: no reconcile next
      bool was_present = e.graph().has_edge(0, 2);
      e.flip(0, 2);
      CHECK(!e.current_cost().has_value());
      e.force_rebuild();  // reconcile restores exact tracking
      CHECK(e.current_cost().has_value());
      CHECK(e.graph().has_edge(0, 2) == !was_present);
    }
  }
}

TEST_CASE("rebuild pipeline") {
  SUBCASE("no violations: the pipeline is skipped") {
    Graph g = Graph::complete(5);
    EngineConfig cfg;
    Engine e = make_engine(g, Clustering::one_cluster(5), "exact", cfg);
    int64_t rebuilds = static_cast<int64_t>(e.rebuild_log().size());
    e.delete_edge(0, 1);
    e.insert_edge(0, 1);
    // Rebuilds may fire, but never from a zero-violation reconcile.
    for (const auto& r : e.rebuild_log()) CHECK(r.input_violation > 0);
    (void)rebuilds;
  }
  SUBCASE("commit never increases the violation size") {
    RngStream rng(1, 1);
    Graph g = Graph::gnp(10, 0.4, rng);
    EngineConfig cfg;
    cfg.epsilon = 0.5;
    Engine e = make_engine(g, Clustering::singletons(10), "pivot", cfg);
    for (int i = 0; i < 150; ++i) {
      VertexId u = static_cast<VertexId>(rng.uniform_int(10));
      VertexId v = static_cast<VertexId>(rng.uniform_int(9));
      if (v >= u) ++v;
      e.flip(u, v);
    }
    for (const auto& r : e.rebuild_log()) {
      if (r.committed) CHECK(r.output_violation <= r.input_violation);
    }
    CHECK(!e.rebuild_log().empty());
  }
}

TEST_CASE("exact plugin keeps the clustering (1+eps)-competitive at every update") {
  for (double eps : {0.1, 0.5}) {
    for (int32_t n : {6, 9, 12}) {
      TwoPathsScript sc = adversary_two_paths(n);
      EngineConfig cfg;
      cfg.epsilon = eps;
      Engine e = make_engine(sc.initial, sc.initial_clustering, "exact", cfg);
      int64_t i = 0;
      for (const UpdateOp& op : sc.stream) {
        e.delete_edge(op.u, op.v);
        ++i;
        auto cost = e.current_cost();
        REQUIRE(cost.has_value());
        int64_t opt = sc.opt_cost_after(i);
        CHECK(static_cast<double>(*cost) <= (1.0 + eps) * static_cast<double>(opt) + 1e-9);
      }
      CHECK(*e.current_cost() == 0);
    }
  }
}

TEST_CASE("random annotated streams stay (1+eps)-competitive with the exact plugin") {
  RngStream rng(2, 2);
  auto orc = oracle();
  for (int trial = 0; trial < 6; ++trial) {
    int32_t n = 8 + static_cast<int32_t>(rng.uniform_int(5));
    Graph g = Graph::gnp(n, 0.4, rng);
    UpdateStream stream = adversary_oblivious_random(g, 120, rng);
    EngineConfig cfg;
    cfg.epsilon = trial % 2 == 0 ? 0.1 : 0.5;
    Engine e = make_engine(g, Clustering::singletons(n), "exact", cfg);
    for (const UpdateOp& op : stream) {
      if (op.kind == '+')
        e.insert_edge(op.u, op.v);
      else
        e.delete_edge(op.u, op.v);
      int64_t opt = orc->opt_cost(e.graph());
      auto cost = e.current_cost();
      REQUIRE(cost.has_value());
      CHECK(static_cast<double>(*cost) <= (1.0 + cfg.epsilon) * static_cast<double>(opt) + 1e-9);
    }
  }
}

TEST_CASE("risky rebuild accounting") {
  // Between any risky rebuild with input size d and its target update, at
  // most 3 rebuilds (inclusive) have input violation above d/2.
  RngStream rng(3, 3);
  for (int trial = 0; trial < 4; ++trial) {
    int32_t n = 9 + static_cast<int32_t>(rng.uniform_int(4));
    Graph g = Graph::gnp(n, 0.4, rng);
    UpdateStream stream = adversary_oblivious_random(g, 200, rng);
    EngineConfig cfg;
    cfg.epsilon = 0.1;
    Engine e = make_engine(g, Clustering::singletons(n), "exact", cfg);
    for (const UpdateOp& op : stream) {
      if (op.kind == '+')
        e.insert_edge(op.u, op.v);
      else
        e.delete_edge(op.u, op.v);
    }
    double mu = cfg.mu();
    CHECK(mu < 1.0 / 6.0);
    const auto& log = e.rebuild_log();
    for (size_t i = 0; i < log.size(); ++i) {
      double window = mu * static_cast<double>(log[i].input_violation);
      int64_t horizon = log[i].update_index + static_cast<int64_t>(window);
      int count = 0;
      for (size_t j = i; j < log.size(); ++j) {
        if (log[j].update_index > horizon) break;
        if (2 * log[j].input_violation > log[i].input_violation) ++count;
      }
      CHECK(count <= 3);
    }
  }
}

TEST_CASE("deamortized mode") {
  SUBCASE("serves the amortized sequence shifted by one epoch") {
    TwoPathsScript sc = adversary_two_paths(12);
    EngineConfig am;
    am.epsilon = 0.5;
    EngineConfig de = am;
    de.mode = EngineMode::Deamortized;
    de.step_quota_factor = 1e9;  // tasks always finish within their epoch
    Engine ea = make_engine(sc.initial, sc.initial_clustering, "exact", am);
    Engine ed = make_engine(sc.initial, sc.initial_clustering, "exact", de);
    std::vector<std::vector<ClusterId>> am_seq, de_seq;
    for (const UpdateOp& op : sc.stream) {
      ea.delete_edge(op.u, op.v);
      ed.delete_edge(op.u, op.v);
      am_seq.push_back(ea.current_clustering());
      de_seq.push_back(ed.current_clustering());
    }
    // Each committed deamortized clustering matches what the amortized run
    // served one epoch earlier; compare via partition signatures at the
    // commit indices recorded in the log.
    const auto& log = ed.rebuild_log();
    REQUIRE(!log.empty());
    for (const auto& r : log) {
      if (!r.committed || r.commit_index > static_cast<int64_t>(de_seq.size())) continue;
      // The deamortized engine serves, right after its commit, exactly what
      // the amortized engine served right after the snapshot update.
      REQUIRE(r.update_index >= 1);
      auto de_labels = de_seq[static_cast<size_t>(r.commit_index) - 1];
      auto am_labels = am_seq[static_cast<size_t>(r.update_index) - 1];
      CHECK(equivalent(Clustering::from_labels(de_labels), Clustering::from_labels(am_labels)));
    }
  }
  SUBCASE("per-update counted work stays bounded") {
    RngStream rng(4, 4);
    Graph g = Graph::gnp(10, 0.4, rng);
    EngineConfig cfg;
    cfg.mode = EngineMode::Deamortized;
    cfg.epsilon = 0.5;
    Engine e = make_engine(g, Clustering::singletons(10), "pivot", cfg);
    for (int i = 0; i < 200; ++i) {
      VertexId u = static_cast<VertexId>(rng.uniform_int(10));
      VertexId v = static_cast<VertexId>(rng.uniform_int(9));
      if (v >= u) ++v;
      e.flip(u, v);
    }
    CHECK(e.max_steps_per_update() > 0);
    // Reconciles and commits are quota-exempt snapshot work; the stepped
    // cursor itself never exceeds its per-update quota by construction, so
    // the observable per-update step count stays within a small multiple of
    // the largest task.
    int64_t biggest = 1;
    for (const auto& r : e.rebuild_log()) biggest = std::max(biggest, r.steps_used);
    CHECK(e.max_steps_per_update() <= 8 * biggest + 64);
  }
  SUBCASE("two-thread mode preserves the observable sequence") {
    TwoPathsScript sc = adversary_two_paths(9);
    EngineConfig a;
    a.mode = EngineMode::Deamortized;
    a.epsilon = 0.5;
    EngineConfig b = a;
    b.background_thread = true;
    Engine ea = make_engine(sc.initial, sc.initial_clustering, "exact", a);
    Engine eb = make_engine(sc.initial, sc.initial_clustering, "exact", b);
    for (const UpdateOp& op : sc.stream) {
      ea.delete_edge(op.u, op.v);
      // The worker thread needs its task finished before the boundary; give
      // it a moment by forcing the rebuild at the same point both sides.
      eb.delete_edge(op.u, op.v);
      ea.force_rebuild();
      eb.force_rebuild();
      CHECK(equivalent(Clustering::from_labels(ea.current_clustering()),
                       Clustering::from_labels(eb.current_clustering())));
    }
  }
}

TEST_CASE("hypothetical plugin commits the optimum or keeps the input") {
  TwoPathsScript sc = adversary_two_paths(9);
  EngineConfig cfg;
  cfg.epsilon = 0.5;
  cfg.seed = 11;
  auto provider = [&sc](const Graph& g) {
    int64_t removed = 2 * static_cast<int64_t>(sc.n) / 3 - g.m();
    return sc.opt_clustering_after(removed);
  };
  Engine e(sc.initial, sc.initial_clustering,
           {make_hypothetical_plugin(0.5, provider)}, cfg, nullptr);
  for (const UpdateOp& op : sc.stream) e.delete_edge(op.u, op.v);
  int64_t i = 0;
  (void)i;
  for (const auto& r : e.rebuild_log()) {
    // Output is either the input (failure) or at most the input size.
    CHECK(r.output_violation <= r.input_violation);
  }
}

TEST_CASE("metrics records appear once per query and per commit") {
  MetricsSink sink;
  TwoPathsScript sc = adversary_two_paths(9);
  EngineConfig cfg;
  cfg.epsilon = 0.5;
  Engine e = make_engine(sc.initial, sc.initial_clustering, "exact", cfg, &sink);
  e.opt_provider = [&sc](const Graph&, int64_t i) { return std::optional(sc.opt_cost_after(i)); };
  int64_t queries = 0;
  for (const UpdateOp& op : sc.stream) {
    e.delete_edge(op.u, op.v);
    e.query();
    ++queries;
  }
  int64_t commit_records = 0, query_records = 0;
  for (const auto& r : sink.records()) {
    if (r.type == "commit") ++commit_records;
    if (r.type == "query") {
      ++query_records;
      REQUIRE(r.opt_cost.has_value());
      if (*r.opt_cost > 0) REQUIRE(r.ratio.has_value());
    }
  }
  CHECK(query_records == queries);
  CHECK(commit_records == static_cast<int64_t>(e.rebuild_log().size()));
}

TEST_CASE("mixed pipeline is never worse than either stage alone") {
  RngStream rng(21, 21);
  Graph g = Graph::gnp(10, 0.5, rng);
  UpdateStream stream = adversary_oblivious_random(g, 12, rng);
  auto run_with = [&](const std::string& pipeline) {
    EngineConfig cfg;
    cfg.epsilon = 0.5;
    cfg.seed = 77;
    pipeline_targets(pipeline, cfg.c, cfg.c_hat);
    Engine e(g, Clustering::singletons(10), make_pipeline(pipeline), cfg, nullptr);
    for (const UpdateOp& op : stream) {
      if (op.kind == '+')
        e.insert_edge(op.u, op.v);
      else
        e.delete_edge(op.u, op.v);
    }
    e.force_rebuild();
    return e.reconciled_violation();
  };
  int64_t mixed = run_with("mixed");
  // The chained best-of commits at most the better stage's violation count.
  CHECK(mixed <= run_with("localsearch"));
  CHECK(mixed <= run_with("clusterlp"));
}
