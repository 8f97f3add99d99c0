#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ccdyn/metrics.hpp"

namespace ccdyn {

/// Declarative experiment configuration (parsed from JSON; see README for
/// the schema). Executes {graph source, adversary, engine config, trials,
/// seeds}, writing one metrics record stream.
struct ExperimentConfig {
  // graph source
  std::string graph_source = "gnp";  // gnp | twoPaths | empty | file
  int32_t n = 9;
  double p_edge = 0.5;
  std::string graph_path;
  // adversary
  std::string adversary = "obliviousRandom";  // obliviousRandom | twoPaths | adaptiveGreedy | replay
  int32_t updates = 100;
  std::string stream_path;
  int32_t query_every = 1;  // 0: no queries
  // engine
  double epsilon = 0.1;
  std::optional<double> mu;
  std::string mode = "amortized";  // amortized | deamortized
  std::string pipeline = "exact";
  double hypothetical_p = 0.5;
  // run
  int32_t trials = 1;
  uint64_t seed = 1;
  int32_t threads = 1;
  bool oracle = false;               // attach the exact-opt metrics provider
  std::optional<double> assert_ratio;  // hard per-query assertion: cost <= r * opt

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
};

struct ExperimentResult {
  MetricsSink metrics;
  bool assertions_ok = true;
  int64_t records = 0;
};

/// Runs the configured trials (optionally across worker threads; each trial
/// owns its engine, adversary, and rng stream) and merges metrics in trial
/// order, so output is byte-identical across repeats and thread counts.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace ccdyn
