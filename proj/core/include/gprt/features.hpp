#ifndef GPRT_FEATURES_HPP_
#define GPRT_FEATURES_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace gprt {

// State description of one (idle truck, candidate task) pair.
enum class Feature : std::size_t {
  travel_time = 0,      // tau(truck location, task source)
  qc_bound_trucks,      // trucks bound to the task's quay crane
  qc_remaining_tasks,   // uncompleted tasks of that quay crane
  qc_available_tasks,   // dispatchable tasks of that quay crane right now
  qc_working_status,    // 1 load, 0 unload (earliest uncompleted task)
  qc_type,              // 1 remote controlled, 0 standard
  src_waiting_trucks,   // trucks queued or in service at the source crane
  dst_waiting_trucks,   // same at the destination crane
  src_avg_op_time,      // observed mean operation time at the source crane
  dst_avg_op_time,      // same at the destination crane
  task_type,            // 1 unload, 0 load
  task_size,            // TEU
  idle_trucks,          // idle trucks at this decision, including this one
  elapsed_time,         // simulation clock, seconds
};

inline constexpr std::size_t kFeatureCount = 14;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "travel_time",        "qc_bound_trucks",    "qc_remaining_tasks",
    "qc_available_tasks", "qc_working_status",  "qc_type",
    "src_waiting_trucks", "dst_waiting_trucks", "src_avg_op_time",
    "dst_avg_op_time",    "task_type",          "task_size",
    "idle_trucks",        "elapsed_time",
};

class FeatureVector {
 public:
  FeatureVector() { values_.fill(0.0); }
  explicit FeatureVector(const std::array<double, kFeatureCount>& values) : values_(values) {}

  double operator[](Feature f) const { return values_[static_cast<std::size_t>(f)]; }
  double& operator[](Feature f) { return values_[static_cast<std::size_t>(f)]; }
  double at(std::size_t i) const { return values_.at(i); }
  double& at(std::size_t i) { return values_.at(i); }

  const std::array<double, kFeatureCount>& values() const { return values_; }

  bool operator==(const FeatureVector&) const = default;

 private:
  std::array<double, kFeatureCount> values_;
};

// Accepts the mnemonic name or the 1-based alias f1..f14.
std::optional<Feature> parse_feature(std::string_view symbol);

inline std::string_view feature_name(Feature f) {
  return kFeatureNames[static_cast<std::size_t>(f)];
}

}  // namespace gprt

#endif  // GPRT_FEATURES_HPP_
