#include "ccdyn/experiment.hpp"

#include <atomic>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "ccdyn/adversary.hpp"
#include "ccdyn/engine.hpp"
#include "ccdyn/oracle.hpp"
#include "ccdyn/plugins.hpp"

namespace ccdyn {

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig c;
  auto require_string = [&](const nlohmann::json& o, const char* key, std::string& into) {
    if (o.contains(key)) {
      if (!o[key].is_string()) throw std::runtime_error(std::string("config: ") + key + " must be a string");
      into = o[key].get<std::string>();
    }
  };
  if (j.contains("graph")) {
    const auto& g = j["graph"];
    require_string(g, "source", c.graph_source);
    if (g.contains("n")) c.n = g["n"].get<int32_t>();
    if (g.contains("p")) c.p_edge = g["p"].get<double>();
    require_string(g, "path", c.graph_path);
  }
  if (j.contains("adversary")) {
    const auto& a = j["adversary"];
    require_string(a, "kind", c.adversary);
    if (a.contains("T")) c.updates = a["T"].get<int32_t>();
    require_string(a, "path", c.stream_path);
    if (a.contains("query_every")) c.query_every = a["query_every"].get<int32_t>();
  }
  if (j.contains("engine")) {
    const auto& e = j["engine"];
    if (e.contains("epsilon")) c.epsilon = e["epsilon"].get<double>();
    if (e.contains("mu")) c.mu = e["mu"].get<double>();
    require_string(e, "mode", c.mode);
    require_string(e, "pipeline", c.pipeline);
    if (e.contains("p_fail")) c.hypothetical_p = e["p_fail"].get<double>();
  }
  if (j.contains("trials")) c.trials = j["trials"].get<int32_t>();
  if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
  if (j.contains("threads")) c.threads = j["threads"].get<int32_t>();
  if (j.contains("oracle")) c.oracle = j["oracle"].get<bool>();
  if (j.contains("assert_ratio") && !j["assert_ratio"].is_null())
    c.assert_ratio = j["assert_ratio"].get<double>();
  if (c.mode != "amortized" && c.mode != "deamortized")
    throw std::runtime_error("config: mode must be amortized or deamortized");
  if (c.trials < 1) throw std::runtime_error("config: trials must be >= 1");
  return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

namespace {

struct TrialOutcome {
  MetricsSink metrics;
  bool ok = true;
};

TrialOutcome run_trial(const ExperimentConfig& cfg, int32_t trial) {
  TrialOutcome out;
  RngStream trial_rng(cfg.seed, static_cast<uint64_t>(trial) + 1);

  Graph initial;
  Clustering initial_clustering;
  UpdateStream stream;
  std::optional<TwoPathsScript> two_paths;

  if (cfg.adversary == "twoPaths" || cfg.graph_source == "twoPaths") {
    two_paths = adversary_two_paths(cfg.n);
    initial = two_paths->initial;
    initial_clustering = two_paths->initial_clustering;
  } else if (cfg.graph_source == "gnp") {
    initial = Graph::gnp(cfg.n, cfg.p_edge, trial_rng);
    initial_clustering = Clustering::singletons(cfg.n);
  } else if (cfg.graph_source == "empty") {
    initial = Graph(cfg.n);
    initial_clustering = Clustering::singletons(cfg.n);
  } else if (cfg.graph_source == "file") {
    initial = read_edge_list_file(cfg.graph_path);
    initial_clustering = Clustering::singletons(initial.n());
  } else {
    throw std::runtime_error("config: unknown graph source " + cfg.graph_source);
  }

  if (cfg.adversary == "twoPaths") {
    stream = two_paths->stream;
  } else if (cfg.adversary == "obliviousRandom") {
    stream = adversary_oblivious_random(initial, cfg.updates, trial_rng);
  } else if (cfg.adversary == "replay") {
    stream = read_stream_file(cfg.stream_path);
  } else if (cfg.adversary != "adaptiveGreedy") {
    throw std::runtime_error("config: unknown adversary " + cfg.adversary);
  }

  auto oracle = std::make_shared<OptOracle>();
  StaticPipelineParams params;
  params.eps = cfg.epsilon;
  EngineConfig ec;
  ec.epsilon = cfg.epsilon;
  pipeline_targets(cfg.pipeline, ec.c, ec.c_hat);
  ec.mu_override = cfg.mu;
  ec.mode = cfg.mode == "deamortized" ? EngineMode::Deamortized : EngineMode::Amortized;
  ec.seed = cfg.seed ^ (0x5eedULL + static_cast<uint64_t>(trial));

  OptClusteringProvider provider;
  if (cfg.pipeline == "hypothetical" && two_paths) {
    // Closed-form optimum; valid at any n on these streams.
    auto script = *two_paths;
    provider = [script](const Graph& g) {
      int64_t removed = 2 * static_cast<int64_t>(script.n) / 3 - g.m();
      return script.opt_clustering_after(removed);
    };
  }
  std::vector<Plugin> pipeline =
      make_pipeline(cfg.pipeline, params, oracle, cfg.hypothetical_p, provider);

  Engine engine(initial, initial_clustering, std::move(pipeline), ec, &out.metrics);
  engine.trial_id = trial;
  bool assertions_ok = true;
  if (cfg.oracle) {
    if (two_paths && cfg.adversary == "twoPaths") {
      auto script = *two_paths;
      engine.opt_provider = [script](const Graph&, int64_t update_index) {
        return std::optional<int64_t>(script.opt_cost_after(update_index));
      };
    } else {
      engine.opt_provider = [oracle](const Graph& g, int64_t) -> std::optional<int64_t> {
        if (g.n() > 16) return std::nullopt;
        return oracle->opt_cost(g);
      };
    }
  }

  auto drive = [&](const UpdateOp& op) {
    if (op.kind == 'Q') {
      engine.query();
      return;
    }
    if (op.kind == '+')
      engine.insert_edge(op.u, op.v);
    else if (op.kind == '-')
      engine.delete_edge(op.u, op.v);
    else
      engine.flip(op.u, op.v);
    if (cfg.query_every > 0 && engine.update_count() % cfg.query_every == 0) engine.query();
  };

  if (cfg.adversary == "adaptiveGreedy") {
    AdaptiveGreedyAdversary adv(initial);
    for (int32_t i = 0; i < cfg.updates; ++i) drive(adv.next(engine.current_clustering()));
  } else {
    for (const UpdateOp& op : stream) drive(op);
  }

  if (cfg.assert_ratio) {
    for (const MetricsRecord& r : out.metrics.records()) {
      if (r.type != "query" || !r.opt_cost || !r.cost) continue;
      if (static_cast<double>(*r.cost) >
          *cfg.assert_ratio * static_cast<double>(*r.opt_cost) + 1e-9)
        assertions_ok = false;
    }
  }

  // Per-trial aggregate row.
  MetricsRecord summary;
  summary.type = "summary";
  summary.trial = trial;
  summary.update_index = engine.update_count();
  summary.violation_size = engine.reconciled_violation();
  summary.epoch = engine.epoch();
  if (auto c = engine.current_cost()) summary.cost = *c;
  double ratio_sum = 0;
  int64_t ratio_count = 0;
  for (const MetricsRecord& r : out.metrics.records()) {
    if (r.type == "query" && r.ratio) {
      ratio_sum += *r.ratio;
      ++ratio_count;
    }
  }
  if (ratio_count > 0)
    summary.extra.emplace_back("mean_ratio", ratio_sum / static_cast<double>(ratio_count));
  summary.extra.emplace_back("assertions_ok", assertions_ok ? 1.0 : 0.0);
  out.metrics.put(summary);
  out.ok = assertions_ok;
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res;
  std::vector<TrialOutcome> outcomes(static_cast<size_t>(cfg.trials));
  int32_t workers = std::max(1, cfg.threads);
  if (workers == 1) {
    for (int32_t t = 0; t < cfg.trials; ++t) outcomes[static_cast<size_t>(t)] = run_trial(cfg, t);
  } else {
    std::atomic<int32_t> next{0};
    std::vector<std::thread> pool;
    for (int32_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          int32_t t = next.fetch_add(1);
          if (t >= cfg.trials) return;
          outcomes[static_cast<size_t>(t)] = run_trial(cfg, t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& o : outcomes) {
    res.metrics.append(o.metrics);
    res.assertions_ok = res.assertions_ok && o.ok;
  }
  res.records = static_cast<int64_t>(res.metrics.records().size());
  return res;
}

}  // namespace ccdyn
