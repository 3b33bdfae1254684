#ifndef GPRT_BRUTE_FORCE_HPP_
#define GPRT_BRUTE_FORCE_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gprt/simulation.hpp"

namespace gprt {

struct BruteForceResult {
  double best_teu_per_hour = 0.0;
  std::vector<TaskId> sequence;  // task chosen at each decision
  std::size_t leaves = 0;        // complete dispatch sequences explored
};

// Enumerates every dispatch sequence the engine admits. Exponential; meant
// for instances of a handful of tasks. Throws std::length_error past
// `max_leaves` complete sequences.
BruteForceResult brute_force_optimum(const TerminalInstance& instance, std::uint64_t seed = 0,
                                     std::size_t max_leaves = 5'000'000);

// Replays a fixed task sequence: scores 1 for the task scheduled at the
// current decision index, 0 otherwise.
class SequenceDispatcher : public Dispatcher {
 public:
  explicit SequenceDispatcher(std::vector<TaskId> sequence) : sequence_(std::move(sequence)) {}
  double score(const DecisionPoint& point, const Candidate& candidate) const override {
    return point.index < sequence_.size() && sequence_[point.index] == candidate.task ? 1.0 : 0.0;
  }

 private:
  std::vector<TaskId> sequence_;
};

}  // namespace gprt

#endif  // GPRT_BRUTE_FORCE_HPP_
