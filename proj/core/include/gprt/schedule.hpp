#ifndef GPRT_SCHEDULE_HPP_
#define GPRT_SCHEDULE_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "gprt/instance.hpp"
#include "gprt/simulation.hpp"

namespace gprt {

// Truck service chains and per-crane service orders that together realize the
// assignment, successor and crane-order variables of a schedule.
struct TimingPlan {
  std::vector<std::vector<TaskId>> truck_chains;
  // Indexed by node; an empty list means no crane precedence at that node.
  std::vector<std::vector<TaskId>> crane_orders;
};

struct TaskTimes {
  std::vector<double> start;
  std::vector<double> end;
};

// Closed-form start/end times: a truck's first task starts at tau(depot, a_i),
// later ones at e_prev + tau(b_prev, a_i); end times add the source operation,
// the loaded trip and the destination operation after any crane predecessor
// releases. Exact against the event engine only when no crane is shared.
// Throws ScheduleError on cyclic precedence.
TaskTimes compute_times(const TerminalInstance& instance, const TimingPlan& plan);

// Chains and crane orders as realized by a simulation run.
TimingPlan plan_from_result(const TerminalInstance& instance, const SimResult& result);

enum class Constraint { single_assignment, single_successor, crane_order };

struct Violation {
  Constraint constraint;
  std::vector<TaskId> tasks;
  std::string message;
};

// Report-only check of the assignment, successor and crane-order rules.
std::vector<Violation> validate_schedule(const SimResult& result,
                                         const TerminalInstance& instance);

struct ReadyTask {
  TaskId task = 0;
  double ready = 0.0;
};

// Serving order of unloading tasks at one quay crane (`queue` is in
// instruction order): each step serves the earliest-ready unserved task
// among the `window` positions starting at the earliest unserved one.
std::vector<TaskId> qc_swap_reorder(const std::vector<ReadyTask>& queue, std::size_t window);

}  // namespace gprt

#endif  // GPRT_SCHEDULE_HPP_
