#include "ccdyn/plugins.hpp"

#include <cmath>
#include <stdexcept>

namespace ccdyn {

Plugin make_identity_plugin() {
  return Plugin{"identity", 0, [](const ClusterRepresentation& rep, RngStream&) {
                  return PluginResult{rep, 1};
                }};
}

Plugin make_exact_plugin(std::shared_ptr<OptOracle> oracle) {
  return Plugin{"exact", 0, [oracle](const ClusterRepresentation& rep, RngStream&) {
                  Graph g = rep.reconstruct_graph();
                  const OptResult& opt = oracle->opt(g);
                  PluginResult out{ClusterRepresentation::from(g, opt.clustering), 1};
                  return out;
                }};
}

OptClusteringProvider oracle_opt_provider(std::shared_ptr<OptOracle> oracle) {
  return [oracle](const Graph& g) { return oracle->opt(g).clustering; };
}

Plugin make_hypothetical_plugin(double p_fail, OptClusteringProvider provider) {
  if (!provider) throw std::invalid_argument("hypothetical plugin needs an opt provider");
  return Plugin{"hypothetical", 0,
                [p_fail, provider](const ClusterRepresentation& rep, RngStream& rng) {
                  if (rng.bernoulli(p_fail)) return PluginResult{rep, 1};
                  Graph g = rep.reconstruct_graph();
                  return PluginResult{ClusterRepresentation::from(g, provider(g)), 1};
                }};
}

Plugin make_pivot_plugin(int32_t repeats) {
  return Plugin{"pivot", 0, [repeats](const ClusterRepresentation& rep, RngStream& rng) {
                  int32_t r = repeats;
                  if (r <= 0) {
                    double n = std::max(4.0, static_cast<double>(rep.n()));
                    r = std::max<int32_t>(1, static_cast<int32_t>(std::ceil(std::log2(std::log2(n)))) + 1);
                  }
                  PluginResult out;
                  StepCounter sc;
                  ClusterRepresentation best = rep;
                  for (int32_t i = 0; i < r; ++i) {
                    PivotOutput po = pivot_cluster(rep, rng);
                    sc.add(static_cast<uint64_t>(po.steps));
                    auto cand = symmetric_difference_update(rep, po.clustering, po.move_log);
                    if (cand) {
                      sc.add(static_cast<uint64_t>(cand->steps));
                      if (cand->rep.violation.size() < best.violation.size()) best = std::move(cand->rep);
                    }
                  }
                  out.rep = std::move(best);
                  out.steps = static_cast<int64_t>(sc.steps);
                  return out;
                }};
}

namespace {

struct PreparedInput {
  ClusterRepresentation cleaned;
  int64_t steps = 0;
};

PreparedInput prepare(const ClusterRepresentation& rep) {
  CleanResult cl = clean(rep);
  return {std::move(cl.rep), cl.steps};
}

}  // namespace

Plugin make_local_search_plugin(StaticPipelineParams params) {
  return Plugin{
      "localsearch", 0, [params](const ClusterRepresentation& rep, RngStream& rng) {
        PluginResult out{rep, 0};
        if (rep.violation.size() == 0) return out;
        ClusterRepresentation current = rep;
        double round_multiplier = params.ls.round_multiplier;
        for (int32_t pass = 0; pass < 8; ++pass) {
          int64_t d_in = current.violation.size();
          if (d_in == 0) break;
          PreparedInput prep = prepare(current);
          out.steps += prep.steps;
          Preclustering pre(&prep.cleaned, params.adm);
          IteratedOptions iter = params.iter;
          iter.ls = params.ls;
          iter.ls.round_multiplier = round_multiplier;
          LocalSearchResult res = iterated_flipping(prep.cleaned, pre, params.eps, rng, iter);
          out.steps += res.steps;
          const ClusterRepresentation& keep = best_of(current, res.rep);
          bool improved = (&keep == &res.rep);
          if (improved) current = std::move(res.rep);
          int64_t d_out = current.violation.size();
          // Large improvements warrant a rerun on the shrunken instance with
          // proportionally more rounds.
          if (!(improved && d_out < params.rerun_delta * static_cast<double>(d_in) && d_out > 0)) break;
          round_multiplier *= std::pow(static_cast<double>(d_in) / static_cast<double>(d_out),
                                       params.rerun_exponent);
        }
        const ClusterRepresentation& keep = best_of(rep, current);
        out.rep = (&keep == &current) ? std::move(current) : rep;
        return out;
      }};
}

Plugin make_cluster_lp_plugin(StaticPipelineParams params) {
  return Plugin{
      "clusterlp", 0, [params](const ClusterRepresentation& rep, RngStream& rng) {
        PluginResult out{rep, 0};
        if (rep.violation.size() == 0) return out;
        PreparedInput prep = prepare(rep);
        out.steps += prep.steps;
        Preclustering pre(&prep.cleaned, params.adm);
        LpOptions lp = params.lp;
        lp.eps = params.eps;
        MwuResult mwu = mwu_solve(prep.cleaned, pre, rng, lp);
        Clustering rounded = pivot_based_rounding(mwu.z, prep.cleaned, rng);
        std::vector<VertexId> moves;
        for (VertexId v = 0; v < prep.cleaned.n(); ++v)
          if (rounded.label(v) != prep.cleaned.clustering.label(v)) moves.push_back(v);
        SymDiffResult sd = symmetric_difference_full(prep.cleaned, rounded, moves);
        out.steps += sd.steps;
        const ClusterRepresentation* best = &rep;
        if (prep.cleaned.violation.size() < best->violation.size()) best = &prep.cleaned;
        if (sd.rep.violation.size() < best->violation.size()) best = &sd.rep;
        out.rep = *best;
        return out;
      }};
}

std::vector<Plugin> make_pipeline(const std::string& name, StaticPipelineParams params,
                                  std::shared_ptr<OptOracle> oracle, double hypothetical_p,
                                  OptClusteringProvider provider) {
  if (name == "pivot") return {make_pivot_plugin()};
  if (name == "localsearch") return {make_local_search_plugin(params)};
  if (name == "clusterlp") return {make_cluster_lp_plugin(params)};
  if (name == "mixed") return {make_local_search_plugin(params), make_cluster_lp_plugin(params)};
  if (name == "identity") return {make_identity_plugin()};
  if (name == "exact") {
    if (!oracle) oracle = std::make_shared<OptOracle>();
    return {make_exact_plugin(oracle)};
  }
  if (name == "hypothetical") {
    if (!provider) {
      if (!oracle) oracle = std::make_shared<OptOracle>();
      provider = oracle_opt_provider(oracle);
    }
    return {make_hypothetical_plugin(hypothetical_p, provider)};
  }
  throw std::invalid_argument("unknown pipeline: " + name);
}

void pipeline_targets(const std::string& name, double& c, double& c_hat) {
  c_hat = 0;
  if (name == "pivot") {
    c = 3.0;
  } else if (name == "localsearch") {
    c = 1.847;
  } else if (name == "clusterlp") {
    c = 1.437;
  } else if (name == "mixed") {
    c = 1.437;
    c_hat = 1.847;
  } else if (name == "exact" || name == "hypothetical" || name == "identity") {
    c = 1.0;
  } else {
    throw std::invalid_argument("unknown pipeline: " + name);
  }
}

}  // namespace ccdyn
