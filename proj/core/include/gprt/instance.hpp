#ifndef GPRT_INSTANCE_HPP_
#define GPRT_INSTANCE_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gprt {

using NodeId = std::size_t;
using TaskId = std::size_t;
using TruckId = std::size_t;

inline constexpr NodeId kDepot = 0;

enum class TaskType : int { load = 0, unload = 1 };

// Raised when a terminal instance breaks one of its structural invariants.
class InstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One container move between a quay crane and a yard crane. Operation times
// are realized once when the instance is generated.
struct TaskSpec {
  TaskId id = 0;
  NodeId source = 0;
  NodeId destination = 0;
  TaskType type = TaskType::load;
  int size = 1;  // TEU, 1 or 2
  double source_op_time = 0.0;       // d_i
  double destination_op_time = 0.0;  // h_i

  double total_op_time() const { return source_op_time + destination_op_time; }

  bool operator==(const TaskSpec&) const = default;
};

// Dense row-major travel time matrix over the depot and all cranes.
class TravelMatrix {
 public:
  TravelMatrix() = default;
  explicit TravelMatrix(std::size_t nodes, double fill = 0.0)
      : size_(nodes), data_(nodes * nodes, fill) {}

  std::size_t size() const { return size_; }
  double operator()(NodeId from, NodeId to) const { return data_[from * size_ + to]; }
  double& operator()(NodeId from, NodeId to) { return data_[from * size_ + to]; }

  bool operator==(const TravelMatrix&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<double> data_;
};

// Node layout: 0 is the depot, 1..Q are quay cranes, Q+1..Q+Y are yard cranes.
// Immutable once constructed; the constructor validates every invariant.
class TerminalInstance {
 public:
  TerminalInstance(std::size_t quay_cranes, std::size_t yard_cranes,
                   std::vector<bool> remote_quay_cranes, TravelMatrix travel,
                   std::size_t trucks, std::vector<TaskSpec> tasks,
                   std::size_t swap_window, std::uint64_t seed);

  std::size_t quay_crane_count() const { return quay_cranes_; }
  std::size_t yard_crane_count() const { return yard_cranes_; }
  std::size_t node_count() const { return 1 + quay_cranes_ + yard_cranes_; }
  std::size_t truck_count() const { return trucks_; }
  std::size_t task_count() const { return tasks_.size(); }
  std::size_t swap_window() const { return swap_window_; }
  std::uint64_t seed() const { return seed_; }

  bool is_quay(NodeId node) const { return node >= 1 && node <= quay_cranes_; }
  bool is_yard(NodeId node) const {
    return node > quay_cranes_ && node < node_count();
  }
  bool is_remote(NodeId quay) const { return remote_[quay - 1]; }
  const std::vector<bool>& remote_flags() const { return remote_; }

  double travel(NodeId from, NodeId to) const { return travel_(from, to); }
  const TravelMatrix& travel_matrix() const { return travel_; }

  const std::vector<TaskSpec>& tasks() const { return tasks_; }
  const TaskSpec& task(TaskId id) const { return tasks_[id]; }

  // The quay crane a task is attached to: its source when unloading,
  // its destination when loading.
  NodeId quay_of(TaskId id) const {
    const TaskSpec& t = tasks_[id];
    return t.type == TaskType::unload ? t.source : t.destination;
  }

  // Mean of every operation time the instance schedules at this crane.
  double nominal_op_time(NodeId crane) const { return nominal_op_time_[crane]; }

  int total_teu() const;

  bool operator==(const TerminalInstance& other) const;

 private:
  void validate() const;

  std::size_t quay_cranes_;
  std::size_t yard_cranes_;
  std::vector<bool> remote_;
  TravelMatrix travel_;
  std::size_t trucks_;
  std::vector<TaskSpec> tasks_;
  std::size_t swap_window_;
  std::uint64_t seed_;
  std::vector<double> nominal_op_time_;
};

}  // namespace gprt

#endif  // GPRT_INSTANCE_HPP_
