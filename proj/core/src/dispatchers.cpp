#include "gprt/dispatchers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gprt {

double manual_heuristic(const ManualParams& params, const FeatureVector& features) {
  const double truck_num = features[Feature::qc_bound_trucks];
  const double travel_time = features[Feature::travel_time];
  double score = truck_num < params.desired_trucks
                     ? travel_time * (truck_num - params.priority)
                     : travel_time * params.desired_trucks;
  if (truck_num >= params.truck_limit) score += 200000.0;
  return score;
}

ManualDispatcher ManualDispatcher::for_instance(const TerminalInstance& instance) {
  const double desired =
      std::max(1.0, std::round(static_cast<double>(instance.truck_count()) /
                               static_cast<double>(instance.quay_crane_count())));
  return ManualDispatcher(ManualParams{desired, 1.0, 2.0 * desired});
}

const ManualParams& ManualDispatcher::params_for(NodeId quay) const {
  const auto it = per_quay_.find(quay);
  return it == per_quay_.end() ? defaults_ : it->second;
}

double ManualDispatcher::score(const DecisionPoint&, const Candidate& candidate) const {
  return -manual_heuristic(params_for(candidate.quay), candidate.features);
}

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double RandomDispatcher::score(const DecisionPoint& point, const Candidate& candidate) const {
  const std::uint64_t h =
      mix64(mix64(mix64(seed_ ^ mix64(point.run_seed)) + point.index) + candidate.task);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::map<std::string, std::unique_ptr<Dispatcher>> baseline_dispatchers(std::uint64_t seed) {
  std::map<std::string, std::unique_ptr<Dispatcher>> out;
  out.emplace("random", std::make_unique<RandomDispatcher>(seed));
  out.emplace("fifo", std::make_unique<FifoDispatcher>());
  out.emplace("stt", std::make_unique<SttDispatcher>());
  out.emplace("mtr", std::make_unique<MtrDispatcher>());
  return out;
}

std::vector<std::size_t> rank_candidates(std::span<const double> scores,
                                         std::span<const TaskId> tasks) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return tasks[a] < tasks[b];
  });
  std::vector<std::size_t> ranks(scores.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = r + 1;
  return ranks;
}

}  // namespace gprt
