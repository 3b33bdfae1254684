#include "gprt/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gprt {

const TaskRecord* SimResult::find(TaskId task) const {
  for (const TaskRecord& r : records) {
    if (r.task == task) return &r;
  }
  return nullptr;
}

Simulation::Simulation(const TerminalInstance& instance, std::uint64_t seed,
                       SimOptions options)
    : instance_(&instance), seed_(seed), options_(options) {
  const std::size_t nodes = instance.node_count();
  const std::size_t n = instance.task_count();
  cranes_.resize(nodes);
  trucks_.resize(instance.truck_count());
  task_state_.assign(n, TaskState::unassigned);
  record_of_.assign(n, std::numeric_limits<std::size_t>::max());
  records_.reserve(n);
  unload_order_.resize(nodes);
  unload_served_.resize(nodes);
  unload_rank_.assign(n, 0);
  unload_cursor_.assign(nodes, 0);
  bound_trucks_.assign(nodes, 0);
  remaining_tasks_.assign(nodes, 0);
  quay_tasks_.resize(nodes);
  quay_cursor_.assign(nodes, 0);
  for (const TaskSpec& t : instance.tasks()) {
    const NodeId quay = instance.quay_of(t.id);
    quay_tasks_[quay].push_back(t.id);
    ++remaining_tasks_[quay];
    if (t.type == TaskType::unload) {
      unload_rank_[t.id] = unload_order_[quay].size();
      unload_order_[quay].push_back(t.id);
      unload_served_[quay].push_back(false);
    }
  }
}

bool Simulation::finished() const { return completed_ == instance_->task_count(); }

void Simulation::schedule(double time, EventKind kind, TruckId truck, TaskId task) {
  events_.push(Event{time, next_sequence_++, kind, truck, task});
}

bool Simulation::unload_servable(TaskId task) const {
  const NodeId quay = instance_->task(task).source;
  // Only the q instruction positions starting at the earliest unserved unload.
  return unload_rank_[task] < unload_cursor_[quay] + instance_->swap_window();
}

bool Simulation::dispatchable(TaskId task) const {
  if (task_state_[task] != TaskState::unassigned) return false;
  return instance_->task(task).type == TaskType::load || unload_servable(task);
}

double Simulation::crane_avg_op_time(NodeId crane) const {
  const Crane& c = cranes_[crane];
  if (c.completed_ops == 0) return instance_->nominal_op_time(crane);
  return c.completed_op_time / static_cast<double>(c.completed_ops);
}

FeatureVector Simulation::features(TruckId truck, TaskId task, std::size_t available) const {
  const TaskSpec& t = instance_->task(task);
  const NodeId quay = instance_->quay_of(task);
  FeatureVector fv;
  fv[Feature::travel_time] = instance_->travel(trucks_[truck].location, t.source);
  fv[Feature::qc_bound_trucks] = static_cast<double>(bound_trucks_[quay]);
  fv[Feature::qc_remaining_tasks] = static_cast<double>(remaining_tasks_[quay]);
  fv[Feature::qc_available_tasks] = static_cast<double>(available);
  const auto& qt = quay_tasks_[quay];
  const std::size_t cursor = quay_cursor_[quay];
  const TaskType head = cursor < qt.size() ? instance_->task(qt[cursor]).type : t.type;
  fv[Feature::qc_working_status] = head == TaskType::load ? 1.0 : 0.0;
  fv[Feature::qc_type] = instance_->is_remote(quay) ? 1.0 : 0.0;
  fv[Feature::src_waiting_trucks] = static_cast<double>(cranes_[t.source].present);
  fv[Feature::dst_waiting_trucks] = static_cast<double>(cranes_[t.destination].present);
  fv[Feature::src_avg_op_time] = crane_avg_op_time(t.source);
  fv[Feature::dst_avg_op_time] = crane_avg_op_time(t.destination);
  fv[Feature::task_type] = t.type == TaskType::unload ? 1.0 : 0.0;
  fv[Feature::task_size] = static_cast<double>(t.size);
  fv[Feature::idle_trucks] = static_cast<double>(
      std::count_if(trucks_.begin(), trucks_.end(), [](const Truck& v) { return v.idle; }));
  fv[Feature::elapsed_time] = now_;
  return fv;
}

void Simulation::collect_candidates(TruckId truck) {
  candidates_.clear();
  std::vector<std::size_t> available(instance_->node_count(), 0);
  for (TaskId id = 0; id < instance_->task_count(); ++id) {
    if (dispatchable(id)) {
      candidates_.push_back(Candidate{id, instance_->quay_of(id), {}});
      ++available[candidates_.back().quay];
    }
  }
  for (Candidate& c : candidates_) c.features = features(truck, c.task, available[c.quay]);
}

bool Simulation::advance() {
  if (pending_) return true;
  for (;;) {
    const bool instant_done = events_.empty() || events_.top().time > now_;
    if (instant_done && dirty_) {
      dirty_ = false;
      for (TruckId v = 0; v < trucks_.size(); ++v) {
        if (!trucks_[v].idle) continue;
        collect_candidates(v);
        if (candidates_.empty()) break;  // same set for every idle truck
        point_ = DecisionPoint{decision_count_, now_, v, seed_};
        pending_ = true;
        return true;
      }
    }
    if (events_.empty()) break;
    const Event e = events_.top();
    events_.pop();
    now_ = e.time;
    process(e);
  }
  if (!finished()) {
    throw ScheduleError("simulation stalled with " +
                        std::to_string(instance_->task_count() - completed_) +
                        " unfinished tasks");
  }
  return false;
}

void Simulation::choose(TaskId task, const std::vector<double>* scores) {
  if (!pending_) throw ScheduleError("choose() called without a pending decision");
  const auto it = std::find_if(candidates_.begin(), candidates_.end(),
                               [task](const Candidate& c) { return c.task == task; });
  if (it == candidates_.end()) {
    throw ScheduleError("task " + std::to_string(task) + " is not a candidate at decision " +
                        std::to_string(point_.index));
  }
  const TruckId v = point_.truck;
  Truck& truck = trucks_[v];
  const TaskSpec& t = instance_->task(task);

  if (options_.record_decisions) {
    DecisionRecord rec{point_.index, now_, v, {}, task};
    rec.candidates.reserve(candidates_.size());
    for (std::size_t k = 0; k < candidates_.size(); ++k) {
      const Candidate& c = candidates_[k];
      rec.candidates.push_back(
          CandidateLog{c.task, c.quay, c.features, scores ? (*scores)[k] : 0.0});
    }
    decisions_.push_back(std::move(rec));
  }

  TaskRecord record;
  record.task = task;
  record.truck = v;
  record.previous_on_truck = truck.last;
  record.dispatch_time = now_;
  record_of_[task] = records_.size();
  records_.push_back(record);

  task_state_[task] = TaskState::assigned;
  ++bound_trucks_[instance_->quay_of(task)];
  truck.idle = false;
  truck.current = task;
  schedule(now_ + instance_->travel(truck.location, t.source), EventKind::arrive_source, v,
           task);

  ++decision_count_;
  pending_ = false;
  dirty_ = true;
}

void Simulation::arrive(NodeId crane, TruckId truck, TaskId task, Stage stage) {
  Crane& c = cranes_[crane];
  ++c.present;
  c.queue.push_back(Waiting{truck, task, stage, now_, next_sequence_++});
  try_serve(crane);
}

void Simulation::try_serve(NodeId crane) {
  Crane& c = cranes_[crane];
  if (c.busy || c.queue.empty()) return;
  auto best = c.queue.end();
  for (auto it = c.queue.begin(); it != c.queue.end(); ++it) {
    const bool windowed = it->stage == Stage::source &&
                          instance_->task(it->task).type == TaskType::unload;
    if (windowed && !unload_servable(it->task)) continue;
    if (best == c.queue.end() || it->arrival < best->arrival ||
        (it->arrival == best->arrival && it->sequence < best->sequence)) {
      best = it;
    }
  }
  if (best == c.queue.end()) return;
  const Waiting w = *best;
  c.queue.erase(best);
  c.busy = true;
  const TaskSpec& t = instance_->task(w.task);
  TaskRecord& record = records_[record_of_[w.task]];
  if (w.stage == Stage::source) {
    record.source_service_start = now_;
    schedule(now_ + t.source_op_time, EventKind::source_done, w.truck, w.task);
  } else {
    record.destination_service_start = now_;
    schedule(now_ + t.destination_op_time, EventKind::destination_done, w.truck, w.task);
  }
}

void Simulation::process(const Event& e) {
  const TaskSpec& t = instance_->task(e.task);
  TaskRecord& record = records_[record_of_[e.task]];
  switch (e.kind) {
    case EventKind::arrive_source:
      record.start = now_;
      trucks_[e.truck].location = t.source;
      arrive(t.source, e.truck, e.task, Stage::source);
      break;
    case EventKind::source_done: {
      record.source_service_end = now_;
      Crane& c = cranes_[t.source];
      c.busy = false;
      --c.present;
      c.completed_op_time += t.source_op_time;
      ++c.completed_ops;
      task_state_[e.task] = TaskState::source_served;
      if (t.type == TaskType::unload) {
        auto& served = unload_served_[t.source];
        served[unload_rank_[e.task]] = true;
        std::size_t& cursor = unload_cursor_[t.source];
        while (cursor < served.size() && served[cursor]) ++cursor;
        dirty_ = true;
      }
      schedule(now_ + instance_->travel(t.source, t.destination),
               EventKind::arrive_destination, e.truck, e.task);
      try_serve(t.source);
      break;
    }
    case EventKind::arrive_destination:
      record.destination_arrival = now_;
      trucks_[e.truck].location = t.destination;
      arrive(t.destination, e.truck, e.task, Stage::destination);
      break;
    case EventKind::destination_done: {
      record.end = now_;
      Crane& c = cranes_[t.destination];
      c.busy = false;
      --c.present;
      c.completed_op_time += t.destination_op_time;
      ++c.completed_ops;
      task_state_[e.task] = TaskState::completed;
      const NodeId quay = instance_->quay_of(e.task);
      --remaining_tasks_[quay];
      --bound_trucks_[quay];
      const auto& qt = quay_tasks_[quay];
      std::size_t& cursor = quay_cursor_[quay];
      while (cursor < qt.size() && task_state_[qt[cursor]] == TaskState::completed) ++cursor;
      Truck& truck = trucks_[e.truck];
      truck.idle = true;
      truck.current.reset();
      truck.last = e.task;
      ++completed_;
      dirty_ = true;
      try_serve(t.destination);
      break;
    }
  }
}

SimResult Simulation::result() const {
  if (!finished()) throw ScheduleError("simulation has unfinished tasks");
  SimResult out;
  out.records = records_;
  out.decisions = decisions_;
  out.teu_per_hour = compute_teu_per_hour(out, instance_->tasks());
  double first = std::numeric_limits<double>::infinity();
  double last = -std::numeric_limits<double>::infinity();
  for (const TaskRecord& r : out.records) {
    first = std::min(first, r.start);
    last = std::max(last, r.end);
  }
  out.makespan = last - first;
  return out;
}

SimResult run_simulation(const TerminalInstance& instance, const Dispatcher& dispatcher,
                         std::uint64_t seed, SimOptions options) {
  Simulation sim(instance, seed, options);
  std::vector<double> scores;
  while (sim.advance()) {
    const DecisionPoint& point = sim.decision();
    const auto& candidates = sim.candidates();
    scores.resize(candidates.size());
    std::size_t best = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const double s = dispatcher.score(point, candidates[k]);
      if (!std::isfinite(s)) {
        throw DispatchError(point.index, "dispatcher returned a non-finite score at decision " +
                                             std::to_string(point.index));
      }
      scores[k] = s;
      if (s > scores[best]) best = k;  // candidates ascend by task id
    }
    sim.choose(candidates[best].task, options.record_decisions ? &scores : nullptr);
  }
  return sim.result();
}

double compute_teu_per_hour(const SimResult& result, const std::vector<TaskSpec>& tasks) {
  if (tasks.empty()) throw ScheduleError("no tasks");
  std::vector<const TaskRecord*> by_task(tasks.size(), nullptr);
  for (const TaskRecord& r : result.records) {
    if (r.task < by_task.size()) by_task[r.task] = &r;
  }
  double first = std::numeric_limits<double>::infinity();
  double last = -std::numeric_limits<double>::infinity();
  int teu = 0;
  for (const TaskSpec& t : tasks) {
    const TaskRecord* r = t.id < by_task.size() ? by_task[t.id] : nullptr;
    if (r == nullptr) throw ScheduleError("task " + std::to_string(t.id) + " has no start/end");
    first = std::min(first, r->start);
    last = std::max(last, r->end);
    teu += t.size;
  }
  const double span = last - first;
  if (!(span > 0.0)) throw ScheduleError("degenerate instance: zero-length schedule span");
  return static_cast<double>(teu) / (span / 3600.0);
}

}  // namespace gprt
