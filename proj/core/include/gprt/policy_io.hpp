#ifndef GPRT_POLICY_IO_HPP_
#define GPRT_POLICY_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <memory>

#include "gprt/policy.hpp"
#include "gprt/training.hpp"

namespace gprt {

// Versioned text checkpoint: architecture, vocabulary ordering, parameters,
// optimizer moments, baseline and episode counter. Doubles are hex floats so
// a save/load cycle is bit-exact.
struct PolicyCheckpoint {
  std::unique_ptr<SequencePolicy> policy;
  TrainState state;
};

void save_policy(std::ostream& out, const SequencePolicy& policy, const TrainState& state);
void save_policy(const std::filesystem::path& path, const SequencePolicy& policy,
                 const TrainState& state);
// Throws std::runtime_error on a malformed file or a vocabulary mismatch.
PolicyCheckpoint load_policy(std::istream& in);
PolicyCheckpoint load_policy(const std::filesystem::path& path);

}  // namespace gprt

#endif  // GPRT_POLICY_IO_HPP_
