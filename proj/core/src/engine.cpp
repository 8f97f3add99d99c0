#include "ccdyn/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ccdyn {

double EngineConfig::mu() const {
  double m = epsilon / (2.0 * (1.0 + epsilon) * std::max(1.0, c));
  m = std::min(m, 1.0 / 6.0);
  if (c_hat > 0) m = std::min(m, 1.0 / (2.0 * c_hat));
  if (mu_override) m = std::min(m, *mu_override);
  return m;
}

Engine::Engine(Graph initial, Clustering initial_clustering, std::vector<Plugin> pipeline,
               EngineConfig cfg, MetricsSink* metrics)
    : graph_(std::move(initial)),
      rep_(ClusterRepresentation::from(graph_, std::move(initial_clustering))),
      buf_(graph_.n()),
      pipeline_(std::move(pipeline)),
      cfg_(cfg),
      metrics_(metrics),
      root_rng_(cfg.seed, 0x9044feed) {
  live_cost_ = rep_.cost();
  cost_known_ = true;
  // The initial clustering is unvetted; the first update triggers a rebuild.
  t_countdown_ = 0;
  paused_ = rep_.cost() == 0;
}

Engine::~Engine() {
  if (task_ && task_->worker.joinable()) task_->worker.join();
}

void Engine::flip(VertexId u, VertexId v) { apply_update(u, v, 0); }

void Engine::insert_edge(VertexId u, VertexId v) {
  if (graph_.has_edge(u, v)) throw std::invalid_argument("insert of an existing edge rejected");
  apply_update(u, v, +1);
}

void Engine::delete_edge(VertexId u, VertexId v) {
  if (!graph_.has_edge(u, v)) throw std::invalid_argument("delete of a missing edge rejected");
  apply_update(u, v, -1);
}

void Engine::apply_update(VertexId u, VertexId v, int annotation) {
  if (u == v) throw std::invalid_argument("self-pair update");
  if (u < 0 || v < 0 || u >= graph_.n() || v >= graph_.n()) throw std::out_of_range("vertex id");
  int64_t steps_before = steps_since_record_;

  graph_.flip_edge(u, v);
  buf_.record(u, v);
  ++update_index_;

  if (annotation == 0) {
    cost_known_ = false;
  } else if (cost_known_) {
    bool same = rep_.clustering.same(u, v);
    // Insert inside a cluster fixes a missing pair; a cross insert is a new
    // violation. Deletions mirror this.
    if (annotation > 0)
      live_cost_ += same ? -1 : +1;
    else
      live_cost_ += same ? +1 : -1;
  }

  if (paused_) {
    paused_ = false;
    t_countdown_ = 0;
  } else {
    --t_countdown_;
  }

  if (cfg_.mode == EngineMode::Amortized) {
    if (t_countdown_ <= 0) synchronous_rebuild();
  } else {
    step_background();
  }
  flush_dirty(cfg_.clean_per_update);

  int64_t used = steps_since_record_ - steps_before;
  max_steps_per_update_ = std::max(max_steps_per_update_, used);
}

void Engine::reconcile() {
  steps_since_record_ += apply_flips(rep_, buf_);
  live_cost_ = rep_.cost();
  cost_known_ = true;
}

PluginResult Engine::run_pipeline(const ClusterRepresentation& input, int64_t rebuild_id) {
  PluginResult cur{input, 0};
  for (size_t i = 0; i < pipeline_.size(); ++i) {
    RngStream rng(cfg_.seed ^ 0xd1e5c0de, static_cast<uint64_t>(rebuild_id) * 64 + i);
    PluginResult out = pipeline_[i].run(cur.rep, rng);
    cur.steps += out.steps;
    int64_t budget = pipeline_[i].budget_factor * (cur.rep.violation.size() + 1);
    if (pipeline_[i].budget_factor > 0 && out.steps > budget) continue;  // stage failed: discard
    const ClusterRepresentation& keep = best_of(cur.rep, out.rep, cfg_.commit_tie);
    if (&keep == &out.rep) cur.rep = std::move(out.rep);
  }
  return cur;
}

void Engine::synchronous_rebuild() {
  reconcile();
  int64_t d_in = rep_.cost();
  if (d_in == 0) {
    paused_ = true;
    ++epoch_;
    return;
  }
  PluginResult out = run_pipeline(rep_, rebuild_counter_);
  ++rebuild_counter_;
  RebuildRecord rec;
  rec.update_index = update_index_;
  rec.commit_index = update_index_;
  rec.input_violation = d_in;
  rec.output_violation = out.rep.violation.size();
  rec.steps_used = out.steps;
  steps_since_record_ += out.steps;
  const ClusterRepresentation& keep = best_of(rep_, out.rep, cfg_.commit_tie);
  rec.committed = (&keep == &out.rep);
  if (rec.committed) rep_ = std::move(out.rep);
  live_cost_ = rep_.cost();
  cost_known_ = true;
  rebuild_log_.push_back(rec);
  t_countdown_ = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(cfg_.mu() * static_cast<double>(rep_.cost()))));
  paused_ = rep_.cost() == 0;
  ++epoch_;
  emit_commit(rec);
}

void Engine::start_task() {
  reconcile();
  if (rep_.cost() == 0) {
    paused_ = true;
    ++epoch_;
    return;
  }
  task_ = std::make_unique<Task>();
  task_->input = rep_;
  task_->snapshot_index = update_index_;
  // Per-update quota sized against the input-protection window.
  int64_t window = std::max<int64_t>(
      1, static_cast<int64_t>(std::ceil(cfg_.mu() * static_cast<double>(rep_.cost()))));
  int64_t rebuild_id = rebuild_counter_++;
  if (cfg_.background_thread) {
    // The worker overlaps the updates; the engine adopts its result at the
    // next update and then follows the exact stepped schedule, so the
    // observable sequence matches the single-thread mode.
    Task* t = task_.get();
    t->worker = std::thread([this, t, rebuild_id] {
      PluginResult out = run_pipeline(t->input, rebuild_id);
      t->output = std::move(out.rep);
      t->total_steps = out.steps;
      t->worker_done.store(true);
    });
  } else {
    PluginResult out = run_pipeline(task_->input, rebuild_id);
    task_->output = std::move(out.rep);
    task_->total_steps = out.steps;
    task_->computed = true;
  }
  task_->window = window;
  ++epoch_;
}

void Engine::step_background() {
  if (!task_) {
    if (t_countdown_ <= 0 && !paused_) start_task();
    return;
  }
  Task& t = *task_;
  if (!t.computed) {
    // Two-thread mode: adopt the worker's result at the commit-point
    // hand-off (single commit point; blocks if the worker is still going).
    if (t.worker.joinable()) t.worker.join();
    t.computed = true;
  }
  if (t.quota == 0)
    t.quota = std::max<int64_t>(
        1, static_cast<int64_t>(std::ceil(cfg_.step_quota_factor *
                                          static_cast<double>(t.total_steps + 1) /
                                          static_cast<double>(t.window))));
  t.cursor += t.quota;
  steps_since_record_ += t.quota;
  if (t.cursor < t.total_steps) return;
  if (t.commit_at < 0) {
    // Output size known: the commit boundary mirrors the amortized schedule.
    int64_t next = std::max<int64_t>(
        1, static_cast<int64_t>(std::ceil(cfg_.mu() * static_cast<double>(t.output.violation.size()))));
    t.commit_at = t.snapshot_index + next;
  }
  if (update_index_ >= t.commit_at) commit_task();
}

void Engine::commit_task() {
  std::unique_ptr<Task> t = std::move(task_);

  RebuildRecord rec;
  rec.update_index = t->snapshot_index;
  rec.commit_index = update_index_;
  rec.input_violation = t->input.violation.size();
  rec.output_violation = t->output.violation.size();
  rec.steps_used = t->total_steps;
  const ClusterRepresentation& keep = best_of(t->input, t->output, cfg_.commit_tie);
  rec.committed = (&keep == &t->output);
  rebuild_log_.push_back(rec);

  if (rec.committed) {
    flush_dirty(-1);  // all label slots must be clean before staging
    std::vector<VertexId> moved;
    for (VertexId v = 0; v < rep_.n(); ++v)
      if (t->output.clustering.label(v) != rep_.clustering.label(v)) moved.push_back(v);
    for (VertexId v : moved) {
      rep_.clustering.stage_move(v, t->output.clustering.label(v));
      ++steps_since_record_;
    }
    rep_.clustering.flip_slots();
    dirty_ = std::move(moved);
    dirty_head_ = 0;
    rep_.violation = std::move(t->output.violation);
    rep_.degree = std::move(t->output.degree);
  }
  emit_commit(rec);
  // The boundary doubles as the next snapshot point.
  if (!paused_) start_task();
}

void Engine::flush_dirty(int32_t limit) {
  int32_t n = limit < 0 ? static_cast<int32_t>(dirty_.size() - dirty_head_) : limit;
  while (n-- > 0 && dirty_head_ < dirty_.size()) {
    rep_.clustering.clean_stale(dirty_[dirty_head_++]);
    ++steps_since_record_;
  }
  if (dirty_head_ >= dirty_.size()) {
    dirty_.clear();
    dirty_head_ = 0;
    if (rep_.clustering.swap_open()) rep_.clustering.finish_swap();
  }
}

void Engine::emit_commit(const RebuildRecord& rec) {
  if (!metrics_) return;
  MetricsRecord m;
  m.type = "commit";
  m.trial = trial_id;
  m.update_index = update_index_;
  if (cost_known_) m.cost = live_cost_;
  m.violation_size = rep_.violation.size();
  m.epoch = epoch_;
  m.steps_used = rec.steps_used;
  metrics_->put(m);
}

void Engine::query() {
  if (!metrics_) return;
  MetricsRecord m;
  m.type = "query";
  m.trial = trial_id;
  m.update_index = update_index_;
  if (cost_known_) m.cost = live_cost_;
  m.violation_size = rep_.violation.size();
  m.epoch = epoch_;
  m.steps_used = steps_since_record_;
  steps_since_record_ = 0;
  if (opt_provider) {
    auto opt = opt_provider(graph_, update_index_);
    if (opt) {
      m.opt_cost = *opt;
      if (cost_known_ && *opt > 0)
        m.ratio = static_cast<double>(live_cost_) / static_cast<double>(*opt);
    }
  }
  metrics_->put(m);
}

std::vector<ClusterId> Engine::current_clustering() const {
  std::vector<ClusterId> out(static_cast<size_t>(rep_.n()));
  for (VertexId v = 0; v < rep_.n(); ++v) out[static_cast<size_t>(v)] = rep_.clustering.label(v);
  return out;
}

void Engine::force_rebuild() {
  if (cfg_.mode == EngineMode::Amortized) {
    synchronous_rebuild();
  } else {
    if (!task_) start_task();
    if (task_) {
      if (!task_->computed) {
        if (task_->worker.joinable()) task_->worker.join();
        task_->computed = true;
      }
      task_->cursor = task_->total_steps;
      task_->commit_at = update_index_;
      commit_task();
    }
  }
}

}  // namespace ccdyn
