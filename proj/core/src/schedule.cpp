#include "gprt/schedule.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <optional>

namespace gprt {

TaskTimes compute_times(const TerminalInstance& instance, const TimingPlan& plan) {
  const std::size_t n = instance.task_count();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

  std::vector<std::size_t> truck_prev(n, none);
  std::vector<bool> on_truck(n, false);
  for (const auto& chain : plan.truck_chains) {
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const TaskId t = chain[k];
      if (t >= n) throw ScheduleError("truck chain references unknown task");
      if (on_truck[t]) throw ScheduleError("task " + std::to_string(t) + " is on two chains");
      on_truck[t] = true;
      if (k > 0) truck_prev[t] = chain[k - 1];
    }
  }
  for (TaskId t = 0; t < n; ++t) {
    if (!on_truck[t]) throw ScheduleError("task " + std::to_string(t) + " is not on any truck");
  }

  std::vector<std::vector<TaskId>> crane_prev(n);
  for (const auto& order : plan.crane_orders) {
    for (std::size_t k = 1; k < order.size(); ++k) crane_prev[order[k]].push_back(order[k - 1]);
  }

  // Kahn's algorithm over truck and crane precedence.
  std::vector<std::vector<TaskId>> successors(n);
  std::vector<std::size_t> indegree(n, 0);
  for (TaskId t = 0; t < n; ++t) {
    if (truck_prev[t] != none) {
      successors[truck_prev[t]].push_back(t);
      ++indegree[t];
    }
    for (TaskId p : crane_prev[t]) {
      successors[p].push_back(t);
      ++indegree[t];
    }
  }
  std::vector<TaskId> ready;
  for (TaskId t = 0; t < n; ++t) {
    if (indegree[t] == 0) ready.push_back(t);
  }

  TaskTimes times{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::size_t resolved = 0;
  while (!ready.empty()) {
    const TaskId i = ready.back();
    ready.pop_back();
    ++resolved;
    const TaskSpec& task = instance.task(i);

    if (truck_prev[i] == none) {
      times.start[i] = instance.travel(kDepot, task.source);
    } else {
      const TaskId j = truck_prev[i];
      times.start[i] = instance.travel(instance.task(j).destination, task.source) + times.end[j];
    }

    const double trip = instance.travel(task.source, task.destination);
    if (crane_prev[i].empty()) {
      times.end[i] = times.start[i] + task.source_op_time + trip + task.destination_op_time;
    } else {
      double release = 0.0;
      for (TaskId p : crane_prev[i]) release = std::max(release, times.end[p]);
      const double via_truck = std::max(times.start[i], release) + task.source_op_time + trip +
                               task.destination_op_time;
      times.end[i] = std::max(via_truck, release + task.source_op_time);
    }

    for (TaskId s : successors[i]) {
      if (--indegree[s] == 0) ready.push_back(s);
    }
  }
  if (resolved != n) throw ScheduleError("cyclic precedence between truck and crane orders");
  return times;
}

TimingPlan plan_from_result(const TerminalInstance& instance, const SimResult& result) {
  TimingPlan plan;
  plan.truck_chains.resize(instance.truck_count());
  std::vector<const TaskRecord*> records(result.records.size());
  for (std::size_t k = 0; k < records.size(); ++k) records[k] = &result.records[k];
  std::stable_sort(records.begin(), records.end(), [](const TaskRecord* a, const TaskRecord* b) {
    return a->dispatch_time < b->dispatch_time;
  });
  for (const TaskRecord* r : records) plan.truck_chains[r->truck].push_back(r->task);

  struct Op {
    double start;
    TaskId task;
  };
  std::vector<std::vector<Op>> ops(instance.node_count());
  for (const TaskRecord& r : result.records) {
    const TaskSpec& t = instance.task(r.task);
    ops[t.source].push_back({r.source_service_start, r.task});
    ops[t.destination].push_back({r.destination_service_start, r.task});
  }
  plan.crane_orders.resize(instance.node_count());
  for (NodeId c = 0; c < ops.size(); ++c) {
    auto& v = ops[c];
    std::sort(v.begin(), v.end(), [](const Op& a, const Op& b) {
      return a.start != b.start ? a.start < b.start : a.task < b.task;
    });
    for (const Op& op : v) plan.crane_orders[c].push_back(op.task);
  }
  return plan;
}

std::vector<Violation> validate_schedule(const SimResult& result,
                                         const TerminalInstance& instance) {
  std::vector<Violation> out;
  const std::size_t n = instance.task_count();

  std::vector<std::vector<const TaskRecord*>> by_task(n);
  for (const TaskRecord& r : result.records) {
    if (r.task >= n || r.truck >= instance.truck_count()) {
      out.push_back({Constraint::single_assignment, {r.task},
                     "record references unknown task or truck"});
      continue;
    }
    by_task[r.task].push_back(&r);
  }
  for (TaskId t = 0; t < n; ++t) {
    if (by_task[t].size() != 1) {
      out.push_back({Constraint::single_assignment, {t},
                     "task " + std::to_string(t) + " assigned to " +
                         std::to_string(by_task[t].size()) + " trucks"});
    }
  }

  std::vector<std::vector<TaskId>> successors(n);
  for (const TaskRecord& r : result.records) {
    if (r.task >= n || !r.previous_on_truck) continue;
    const TaskId p = *r.previous_on_truck;
    if (p >= n) {
      out.push_back({Constraint::single_successor, {r.task}, "unknown predecessor task"});
      continue;
    }
    successors[p].push_back(r.task);
    const bool same_truck = std::any_of(by_task[p].begin(), by_task[p].end(),
                                        [&](const TaskRecord* q) { return q->truck == r.truck; });
    if (!same_truck) {
      out.push_back({Constraint::single_successor, {p, r.task},
                     "task " + std::to_string(r.task) + " follows task " + std::to_string(p) +
                         " which ran on another truck"});
    }
  }
  for (TaskId t = 0; t < n; ++t) {
    if (successors[t].size() > 1) {
      std::vector<TaskId> ids{t};
      ids.insert(ids.end(), successors[t].begin(), successors[t].end());
      out.push_back({Constraint::single_successor, ids,
                     "task " + std::to_string(t) + " has " +
                         std::to_string(successors[t].size()) + " successors"});
    }
  }

  // Crane occupancy intervals must not overlap.
  struct Interval {
    double begin;
    double end;
    TaskId task;
  };
  std::vector<std::vector<Interval>> busy(instance.node_count());
  for (TaskId t = 0; t < n; ++t) {
    if (by_task[t].size() != 1) continue;
    const TaskRecord& r = *by_task[t][0];
    const TaskSpec& spec = instance.task(t);
    busy[spec.source].push_back({r.source_service_start, r.source_service_end, t});
    busy[spec.destination].push_back({r.destination_service_start, r.end, t});
  }
  for (NodeId c = 0; c < busy.size(); ++c) {
    auto& v = busy[c];
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) {
      return a.begin != b.begin ? a.begin < b.begin : a.task < b.task;
    });
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (v[k].begin < v[k - 1].end) {
        out.push_back({Constraint::crane_order, {v[k - 1].task, v[k].task},
                       "tasks " + std::to_string(v[k - 1].task) + " and " +
                           std::to_string(v[k].task) + " overlap at crane " +
                           std::to_string(c)});
      }
    }
  }

  // Quay crane unloading order may depart from instruction order by <= q.
  const auto q = static_cast<long>(instance.swap_window());
  for (NodeId c = 1; c <= instance.quay_crane_count(); ++c) {
    std::vector<TaskId> instruction;
    for (const TaskSpec& spec : instance.tasks()) {
      if (spec.type == TaskType::unload && spec.source == c && by_task[spec.id].size() == 1) {
        instruction.push_back(spec.id);
      }
    }
    std::vector<TaskId> served = instruction;
    std::stable_sort(served.begin(), served.end(), [&](TaskId a, TaskId b) {
      return by_task[a][0]->source_service_start < by_task[b][0]->source_service_start;
    });
    for (std::size_t p = 0; p < served.size(); ++p) {
      const auto r = static_cast<long>(
          std::find(instruction.begin(), instruction.end(), served[p]) - instruction.begin());
      if (std::labs(static_cast<long>(p) - r) > q) {
        out.push_back({Constraint::crane_order, {served[p]},
                       "unloading task " + std::to_string(served[p]) + " served at position " +
                           std::to_string(p) + " but instructed at " + std::to_string(r)});
      }
    }
  }
  return out;
}

std::vector<TaskId> qc_swap_reorder(const std::vector<ReadyTask>& queue, std::size_t window) {
  window = std::max<std::size_t>(window, 1);
  std::vector<bool> served(queue.size(), false);
  std::vector<TaskId> order;
  order.reserve(queue.size());
  std::size_t head = 0;
  while (order.size() < queue.size()) {
    while (served[head]) ++head;
    std::optional<std::size_t> pick;
    for (std::size_t k = head; k < queue.size() && k < head + window; ++k) {
      if (served[k]) continue;
      if (!pick || queue[k].ready < queue[*pick].ready) pick = k;
    }
    served[*pick] = true;
    order.push_back(queue[*pick].task);
  }
  return order;
}

}  // namespace gprt
