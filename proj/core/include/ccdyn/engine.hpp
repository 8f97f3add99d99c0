#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ccdyn/metrics.hpp"
#include "ccdyn/reconcile.hpp"
#include "ccdyn/representation.hpp"
#include "ccdyn/rng.hpp"

namespace ccdyn {

struct PluginResult {
  ClusterRepresentation rep;
  int64_t steps = 0;
};

/// A static-algorithm stage: consumes a reconciled representation, produces
/// another. The engine enforces the step budget (budget_factor * (|D|+1)
/// counted basic operations; 0 disables the check) and discards outputs that
/// exceed it.
struct Plugin {
  std::string name;
  int64_t budget_factor = 0;
  std::function<PluginResult(const ClusterRepresentation&, RngStream&)> run;
};

enum class EngineMode { Amortized, Deamortized };

struct EngineConfig {
  double epsilon = 0.1;
  double c = 1.0;      // approximation target of the pipeline
  double c_hat = 0.0;  // secondary target in mixed mode; 0 when unused
  std::optional<double> mu_override;
  EngineMode mode = EngineMode::Amortized;
  uint64_t seed = 0;
  /// Commit rule for rebuild outputs: accept when |D'| <= |D| (KeepSecond,
  /// the flip-procedure reading) or only when strictly smaller (KeepFirst).
  TieRule commit_tie = TieRule::KeepSecond;
  int32_t clean_per_update = 4;          // stale-slot cleanup quota
  double step_quota_factor = 4.0;        // background steps per update multiplier
  bool background_thread = false;        // optional two-thread rebuild mode

  /// mu = min(eps / (2(1+eps)c), 1/6 [, 1/(2 c_hat)]); an override may only
  /// lower it.
  double mu() const;
};

struct RebuildRecord {
  int64_t update_index = 0;     // update at which the rebuild input was frozen
  int64_t commit_index = 0;     // update at which the output was committed
  int64_t input_violation = 0;
  int64_t output_violation = 0;
  bool committed = false;
  int64_t steps_used = 0;
};

/// Fully-dynamic driver: buffers edge flips, reconciles and rebuilds through
/// the plugin pipeline every ~mu*|D| updates, and keeps the better of the
/// old and new representations. Deamortized mode runs the rebuild as a
/// background task stepped along with the updates and swaps the result in
/// with the two-slot label flip, one epoch behind the amortized schedule.
class Engine {
 public:
  Engine(Graph initial, Clustering initial_clustering, std::vector<Plugin> pipeline,
         EngineConfig cfg, MetricsSink* metrics = nullptr);
  ~Engine();

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Unannotated flip; exact cost tracking degrades to "unknown" until the
  /// next reconcile.
  void flip(VertexId u, VertexId v);
  /// Annotated updates; mis-annotations (inserting a present edge, deleting
  /// an absent one) are rejected with std::invalid_argument.
  void insert_edge(VertexId u, VertexId v);
  void delete_edge(VertexId u, VertexId v);

  /// Emits one "query" metrics record (plus the oracle fields when an opt
  /// provider is attached).
  void query();

  std::vector<ClusterId> current_clustering() const;
  bool same_cluster(VertexId u, VertexId v) const {
    return rep_.clustering.same(u, v);
  }
  /// Exact live cost, or nullopt after an unannotated flip.
  std::optional<int64_t> current_cost() const { return cost_known_ ? std::optional(live_cost_) : std::nullopt; }

  int64_t update_count() const { return update_index_; }
  int64_t epoch() const { return epoch_; }
  /// Violation size of the last reconciled representation.
  int64_t reconciled_violation() const { return rep_.violation.size(); }
  const Graph& graph() const { return graph_; }
  const std::vector<RebuildRecord>& rebuild_log() const { return rebuild_log_; }
  int32_t trial_id = 0;

  /// Oracle hook used only for metrics (never by the algorithms).
  std::function<std::optional<int64_t>(const Graph&, int64_t update_index)> opt_provider;

  /// Forces a synchronous reconcile+rebuild now (used by tests/harness).
  void force_rebuild();

  /// Maximum counted steps spent in any single update (deamortized mode).
  int64_t max_steps_per_update() const { return max_steps_per_update_; }

 private:
  struct Task {
    ClusterRepresentation input;       // frozen reconciled snapshot
    int64_t snapshot_index = 0;
    int64_t total_steps = 0;           // counted cost of the computed pipeline
    int64_t cursor = 0;                // stepped progress
    int64_t quota = 0;                 // steps advanced per update (sized lazily)
    int64_t window = 1;                // input-protection window in updates
    ClusterRepresentation output;
    int64_t commit_at = -1;            // boundary once the output size is known
    bool computed = false;
    std::thread worker;
    std::atomic<bool> worker_done{false};
  };

  void apply_update(VertexId u, VertexId v, int annotation);  // -1 delete, +1 insert, 0 flip
  void reconcile();
  PluginResult run_pipeline(const ClusterRepresentation& input, int64_t rebuild_id);
  void synchronous_rebuild();
  void start_task();
  void step_background();
  void commit_task();
  void flush_dirty(int32_t limit);
  void emit_commit(const RebuildRecord& rec);

  Graph graph_;
  ClusterRepresentation rep_;
  UpdateBuffer buf_;
  std::vector<Plugin> pipeline_;
  EngineConfig cfg_;
  MetricsSink* metrics_ = nullptr;

  RngStream root_rng_;
  int64_t update_index_ = 0;
  int64_t epoch_ = 0;
  int64_t t_countdown_ = 0;
  bool paused_ = false;
  int64_t rebuild_counter_ = 0;

  bool cost_known_ = true;
  int64_t live_cost_ = 0;

  std::unique_ptr<Task> task_;
  std::vector<VertexId> dirty_;
  size_t dirty_head_ = 0;

  std::vector<RebuildRecord> rebuild_log_;
  int64_t steps_since_record_ = 0;
  int64_t max_steps_per_update_ = 0;
};

}  // namespace ccdyn
