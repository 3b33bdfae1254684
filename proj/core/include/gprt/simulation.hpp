#ifndef GPRT_SIMULATION_HPP_
#define GPRT_SIMULATION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "gprt/features.hpp"
#include "gprt/instance.hpp"

namespace gprt {

// Context handed to a dispatcher alongside each candidate.
struct DecisionPoint {
  std::size_t index = 0;  // 0-based decision counter within the run
  double time = 0.0;
  TruckId truck = 0;
  std::uint64_t run_seed = 0;
};

struct Candidate {
  TaskId task = 0;
  NodeId quay = 0;
  FeatureVector features;
};

// Scores a candidate task for an idle truck; the engine assigns the argmax
// (ties to the smallest task id). Implementations must be pure.
class Dispatcher {
 public:
  virtual ~Dispatcher() = default;
  virtual double score(const DecisionPoint& point, const Candidate& candidate) const = 0;
};

class DispatchError : public std::runtime_error {
 public:
  DispatchError(std::size_t decision, const std::string& what)
      : std::runtime_error(what), decision_(decision) {}
  std::size_t decision() const { return decision_; }

 private:
  std::size_t decision_;
};

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Realized service of one task. `start` is s_i (arrival at the source crane),
// `end` is e_i (completion at the destination crane).
struct TaskRecord {
  TaskId task = 0;
  TruckId truck = 0;
  std::optional<TaskId> previous_on_truck;
  double dispatch_time = 0.0;
  double start = 0.0;
  double source_service_start = 0.0;
  double source_service_end = 0.0;
  double destination_arrival = 0.0;
  double destination_service_start = 0.0;
  double end = 0.0;

  bool operator==(const TaskRecord&) const = default;
};

struct CandidateLog {
  TaskId task = 0;
  NodeId quay = 0;
  FeatureVector features;
  double score = 0.0;

  bool operator==(const CandidateLog&) const = default;
};

struct DecisionRecord {
  std::size_t index = 0;
  double time = 0.0;
  TruckId truck = 0;
  std::vector<CandidateLog> candidates;
  TaskId chosen = 0;

  bool operator==(const DecisionRecord&) const = default;
};

struct SimResult {
  // Assignment records in assignment order; a valid run holds one per task.
  std::vector<TaskRecord> records;
  std::vector<DecisionRecord> decisions;
  double teu_per_hour = 0.0;
  double makespan = 0.0;

  // Record for a task, or nullptr when it was never assigned.
  const TaskRecord* find(TaskId task) const;

  bool operator==(const SimResult&) const = default;
};

struct SimOptions {
  bool record_decisions = false;
};

// Event-driven truck dispatch simulation that stops at each decision so the
// caller (a dispatcher driver or an exhaustive search) can choose the task.
// Copyable: copying snapshots the full simulator state.
class Simulation {
 public:
  Simulation(const TerminalInstance& instance, std::uint64_t seed, SimOptions options = {});

  // Runs events until an idle truck has dispatchable candidates or the run is
  // complete. Returns true when a decision is pending.
  bool advance();

  bool finished() const;
  const DecisionPoint& decision() const { return point_; }
  const std::vector<Candidate>& candidates() const { return candidates_; }

  // Assigns the pending truck to `task`, which must be among the candidates.
  void choose(TaskId task, const std::vector<double>* scores = nullptr);

  // Call once finished(); fills TEU/h and makespan.
  SimResult result() const;

  const TerminalInstance& instance() const { return *instance_; }
  double now() const { return now_; }

 private:
  enum class EventKind { arrive_source, source_done, arrive_destination, destination_done };
  struct Event {
    double time;
    std::uint64_t sequence;
    EventKind kind;
    TruckId truck;
    TaskId task;
    bool operator>(const Event& o) const {
      return time != o.time ? time > o.time : sequence > o.sequence;
    }
  };
  enum class Stage { source, destination };
  struct Waiting {
    TruckId truck;
    TaskId task;
    Stage stage;
    double arrival;
    std::uint64_t sequence;
  };
  struct Crane {
    bool busy = false;
    std::vector<Waiting> queue;
    std::size_t present = 0;  // trucks queued or in service
    double completed_op_time = 0.0;
    std::size_t completed_ops = 0;
  };
  struct Truck {
    NodeId location = kDepot;
    bool idle = true;
    std::optional<TaskId> current;
    std::optional<TaskId> last;
  };
  enum class TaskState { unassigned, assigned, source_served, completed };

  void schedule(double time, EventKind kind, TruckId truck, TaskId task);
  void process(const Event& e);
  void arrive(NodeId crane, TruckId truck, TaskId task, Stage stage);
  void try_serve(NodeId crane);
  bool unload_servable(TaskId task) const;
  bool dispatchable(TaskId task) const;
  void collect_candidates(TruckId truck);
  FeatureVector features(TruckId truck, TaskId task, std::size_t available) const;
  double crane_avg_op_time(NodeId crane) const;

  const TerminalInstance* instance_;
  std::uint64_t seed_;
  SimOptions options_;

  double now_ = 0.0;
  std::uint64_t next_sequence_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::vector<Crane> cranes_;
  std::vector<Truck> trucks_;
  std::vector<TaskState> task_state_;
  std::vector<std::size_t> record_of_;  // task -> index in records_
  std::vector<TaskRecord> records_;
  std::vector<DecisionRecord> decisions_;
  // Per quay crane: unload tasks in instruction order and how many have been
  // served at the source; used for the swap window.
  std::vector<std::vector<TaskId>> unload_order_;
  std::vector<std::size_t> unload_rank_;  // task -> position in its quay list
  std::vector<std::vector<bool>> unload_served_;
  std::vector<std::size_t> bound_trucks_;     // per node, quay cranes only
  std::vector<std::size_t> remaining_tasks_;  // per node, quay cranes only
  std::vector<std::vector<TaskId>> quay_tasks_;  // per node, instruction order
  std::vector<std::size_t> quay_cursor_;         // first uncompleted entry
  std::vector<std::size_t> unload_cursor_;       // first unserved unload entry
  bool dirty_ = true;  // candidate set may have changed since the last scan
  std::size_t completed_ = 0;
  std::size_t decision_count_ = 0;

  bool pending_ = false;
  DecisionPoint point_;
  std::vector<Candidate> candidates_;
};

// Drives a Simulation with `dispatcher` until every task completes.
SimResult run_simulation(const TerminalInstance& instance, const Dispatcher& dispatcher,
                         std::uint64_t seed, SimOptions options = {});

// Sum of TEU over (max end - min start) in hours. Throws ScheduleError on a
// zero-length span or an unassigned task.
double compute_teu_per_hour(const SimResult& result, const std::vector<TaskSpec>& tasks);

}  // namespace gprt

#endif  // GPRT_SIMULATION_HPP_
