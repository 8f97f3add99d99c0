#pragma once

#include <functional>
#include <memory>

#include "ccdyn/cluster_lp.hpp"
#include "ccdyn/engine.hpp"
#include "ccdyn/local_search.hpp"
#include "ccdyn/oracle.hpp"
#include "ccdyn/pivot.hpp"
#include "ccdyn/preclustering.hpp"

namespace ccdyn {

/// Identity stage (always "fails" to improve); useful as a baseline.
Plugin make_identity_plugin();

/// Exact optimum via the brute-force oracle (n <= 16); the reference plugin
/// for the dynamic-approximation checks.
Plugin make_exact_plugin(std::shared_ptr<OptOracle> oracle);

/// With probability 1-p returns an optimal representation (from the given
/// provider), otherwise returns the input unchanged.
using OptClusteringProvider = std::function<Clustering(const Graph&)>;
Plugin make_hypothetical_plugin(double p_fail, OptClusteringProvider provider);
OptClusteringProvider oracle_opt_provider(std::shared_ptr<OptOracle> oracle);

/// Pivot repeated ~log log n times, best violation kept.
Plugin make_pivot_plugin(int32_t repeats = 0);  // 0: derive from n

struct StaticPipelineParams {
  double eps = 0.1;
  AdmParams adm{};
  LocalSearchOptions ls{};
  IteratedOptions iter{};
  LpOptions lp{};
  /// Rerun threshold: repeat the whole pass (clean+precluster+search) when
  /// the output shrinks below delta * |D|, scaling rounds by (|D|/|D'|)^0.6.
  double rerun_delta = 0.25;
  double rerun_exponent = 0.6;
};

/// Clean -> precluster -> iterated flipping local search (with the rerun
/// rule), best-of with the input.
Plugin make_local_search_plugin(StaticPipelineParams params = {});

/// Clean -> precluster -> covering-relaxation solve -> pivot-based rounding,
/// best-of with the input.
Plugin make_cluster_lp_plugin(StaticPipelineParams params = {});

/// Named pipeline factory: "pivot", "localsearch", "clusterlp", "mixed"
/// (localsearch then clusterlp), "exact", "hypothetical", "identity".
std::vector<Plugin> make_pipeline(const std::string& name, StaticPipelineParams params = {},
                                  std::shared_ptr<OptOracle> oracle = nullptr,
                                  double hypothetical_p = 0.5,
                                  OptClusteringProvider provider = nullptr);

/// Default approximation target c (and c_hat for "mixed") per pipeline name.
void pipeline_targets(const std::string& name, double& c, double& c_hat);

}  // namespace ccdyn
