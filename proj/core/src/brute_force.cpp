#include "gprt/brute_force.hpp"

#include <stdexcept>

namespace gprt {

namespace {

struct Search {
  std::size_t max_leaves;
  BruteForceResult best;
  std::vector<TaskId> path;

  void explore(Simulation sim) {
    if (!sim.advance()) {
      if (++best.leaves > max_leaves) throw std::length_error("brute force leaf budget exceeded");
      const double teu = sim.result().teu_per_hour;
      if (best.sequence.empty() || teu > best.best_teu_per_hour) {
        best.best_teu_per_hour = teu;
        best.sequence = path;
      }
      return;
    }
    const std::vector<Candidate> candidates = sim.candidates();
    for (const Candidate& c : candidates) {
      Simulation branch = sim;
      branch.choose(c.task);
      path.push_back(c.task);
      explore(std::move(branch));
      path.pop_back();
    }
  }
};

}  // namespace

BruteForceResult brute_force_optimum(const TerminalInstance& instance, std::uint64_t seed,
                                     std::size_t max_leaves) {
  Search search{max_leaves, {}, {}};
  search.explore(Simulation(instance, seed));
  return search.best;
}

}  // namespace gprt
