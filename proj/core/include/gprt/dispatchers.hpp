#ifndef GPRT_DISPATCHERS_HPP_
#define GPRT_DISPATCHERS_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gprt/expr_tree.hpp"
#include "gprt/simulation.hpp"

namespace gprt {

// Dispatches by evaluating a heuristic expression on each candidate.
class ExprDispatcher : public Dispatcher {
 public:
  explicit ExprDispatcher(const ExprTree& tree) : program_(tree) {}
  double score(const DecisionPoint&, const Candidate& candidate) const override {
    return program_.evaluate(candidate.features);
  }

 private:
  CompiledExpr program_;
};

struct ManualParams {
  double desired_trucks = 3.0;
  double priority = 1.0;
  double truck_limit = 6.0;
};

// The coordinators' rule as written: a cost-like score where lower is better
// and 200000 penalizes quay cranes at their truck limit.
double manual_heuristic(const ManualParams& params, const FeatureVector& features);

// Engine-facing wrapper: negates manual_heuristic so argmax picks the
// preferred crane. Parameters may differ per quay crane.
class ManualDispatcher : public Dispatcher {
 public:
  explicit ManualDispatcher(ManualParams defaults, std::map<NodeId, ManualParams> per_quay = {})
      : defaults_(defaults), per_quay_(std::move(per_quay)) {}

  // desired = trucks / quay cranes (rounded, at least 1), priority 1, limit 2 x desired.
  static ManualDispatcher for_instance(const TerminalInstance& instance);

  const ManualParams& params_for(NodeId quay) const;
  double score(const DecisionPoint&, const Candidate& candidate) const override;

 private:
  ManualParams defaults_;
  std::map<NodeId, ManualParams> per_quay_;
};

// Uniform choice among candidates, reproducible from (seed, run seed,
// decision index, task id).
class RandomDispatcher : public Dispatcher {
 public:
  explicit RandomDispatcher(std::uint64_t seed = 0) : seed_(seed) {}
  double score(const DecisionPoint& point, const Candidate& candidate) const override;

 private:
  std::uint64_t seed_;
};

// Smallest instruction index first.
class FifoDispatcher : public Dispatcher {
 public:
  double score(const DecisionPoint&, const Candidate& candidate) const override {
    return -static_cast<double>(candidate.task);
  }
};

// Shortest travel time to the task's source.
class SttDispatcher : public Dispatcher {
 public:
  double score(const DecisionPoint&, const Candidate& candidate) const override {
    return -candidate.features[Feature::travel_time];
  }
};

// Quay crane with the most remaining tasks.
class MtrDispatcher : public Dispatcher {
 public:
  double score(const DecisionPoint&, const Candidate& candidate) const override {
    return candidate.features[Feature::qc_remaining_tasks];
  }
};

// random, fifo, stt, mtr.
std::map<std::string, std::unique_ptr<Dispatcher>> baseline_dispatchers(std::uint64_t seed = 0);

// Ranks 1..k by descending score; equal scores rank by ascending task id.
std::vector<std::size_t> rank_candidates(std::span<const double> scores,
                                         std::span<const TaskId> tasks);

std::uint64_t mix64(std::uint64_t x);

}  // namespace gprt

#endif  // GPRT_DISPATCHERS_HPP_
