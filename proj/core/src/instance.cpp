#include "gprt/instance.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace gprt {

namespace {

std::string node_name(NodeId node) { return "node " + std::to_string(node); }

}  // namespace

TerminalInstance::TerminalInstance(std::size_t quay_cranes, std::size_t yard_cranes,
                                   std::vector<bool> remote_quay_cranes,
                                   TravelMatrix travel, std::size_t trucks,
                                   std::vector<TaskSpec> tasks,
                                   std::size_t swap_window, std::uint64_t seed)
    : quay_cranes_(quay_cranes),
      yard_cranes_(yard_cranes),
      remote_(std::move(remote_quay_cranes)),
      travel_(std::move(travel)),
      trucks_(trucks),
      tasks_(std::move(tasks)),
      swap_window_(swap_window),
      seed_(seed) {
  if (remote_.empty()) remote_.assign(quay_cranes_, false);
  validate();

  std::vector<double> sum(node_count(), 0.0);
  std::vector<std::size_t> count(node_count(), 0);
  for (const TaskSpec& t : tasks_) {
    sum[t.source] += t.source_op_time;
    ++count[t.source];
    sum[t.destination] += t.destination_op_time;
    ++count[t.destination];
  }
  nominal_op_time_.assign(node_count(), 0.0);
  for (NodeId n = 1; n < node_count(); ++n) {
    if (count[n] > 0) nominal_op_time_[n] = sum[n] / static_cast<double>(count[n]);
  }
}

void TerminalInstance::validate() const {
  if (quay_cranes_ < 1) throw InstanceError("instance needs at least one quay crane");
  if (yard_cranes_ < 1) throw InstanceError("instance needs at least one yard crane");
  if (trucks_ < 1) throw InstanceError("instance needs at least one truck");
  if (tasks_.empty()) throw InstanceError("instance needs at least one task");
  if (swap_window_ < 1) throw InstanceError("swap window q must be >= 1");
  if (remote_.size() != quay_cranes_) {
    throw InstanceError("remote flag count does not match quay crane count");
  }
  const std::size_t nodes = node_count();
  if (travel_.size() != nodes) {
    throw InstanceError("travel matrix is " + std::to_string(travel_.size()) + "x" +
                        std::to_string(travel_.size()) + ", expected " +
                        std::to_string(nodes));
  }
  for (NodeId x = 0; x < nodes; ++x) {
    for (NodeId y = 0; y < nodes; ++y) {
      const double t = travel_(x, y);
      if (x == y) {
        if (t != 0.0) throw InstanceError("travel time from " + node_name(x) + " to itself must be 0");
      } else if (!std::isfinite(t) || t <= 0.0) {
        throw InstanceError("unreachable or invalid travel time from " + node_name(x) +
                            " to " + node_name(y));
      }
    }
  }
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    const TaskSpec& t = tasks_[i];
    const std::string which = "task " + std::to_string(i);
    if (t.id != i) throw InstanceError(which + " has id " + std::to_string(t.id));
    if (t.source == kDepot || t.source >= nodes || t.destination == kDepot ||
        t.destination >= nodes) {
      throw InstanceError(which + " references an unknown crane");
    }
    const bool unload = is_quay(t.source) && is_yard(t.destination);
    const bool load = is_yard(t.source) && is_quay(t.destination);
    if (!unload && !load) {
      throw InstanceError(which + " must move between a quay crane and a yard crane");
    }
    if ((t.type == TaskType::unload) != unload) {
      throw InstanceError(which + " type disagrees with its source crane");
    }
    if (t.size != 1 && t.size != 2) throw InstanceError(which + " size must be 1 or 2 TEU");
    if (!(t.source_op_time > 0.0) || !(t.destination_op_time > 0.0) ||
        !std::isfinite(t.source_op_time) || !std::isfinite(t.destination_op_time)) {
      throw InstanceError(which + " operation times must be positive");
    }
  }
}

int TerminalInstance::total_teu() const {
  return std::accumulate(tasks_.begin(), tasks_.end(), 0,
                         [](int acc, const TaskSpec& t) { return acc + t.size; });
}

bool TerminalInstance::operator==(const TerminalInstance& other) const {
  return quay_cranes_ == other.quay_cranes_ && yard_cranes_ == other.yard_cranes_ &&
         remote_ == other.remote_ && travel_ == other.travel_ &&
         trucks_ == other.trucks_ && tasks_ == other.tasks_ &&
         swap_window_ == other.swap_window_ && seed_ == other.seed_;
}

}  // namespace gprt
