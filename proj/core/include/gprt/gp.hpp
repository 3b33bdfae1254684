#ifndef GPRT_GP_HPP_
#define GPRT_GP_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "gprt/expr_tree.hpp"
#include "gprt/instance.hpp"

namespace gprt {

using Rng = std::mt19937_64;

inline constexpr double kFailedFitness = -std::numeric_limits<double>::infinity();

enum class Origin { random, crossover, mutation, reproduction, nn_seeded };

std::string_view origin_name(Origin origin);
std::optional<Origin> parse_origin(std::string_view name);

struct Individual {
  ExprTree tree;
  std::optional<double> fitness;  // mean TEU/h, kFailedFitness on simulation error
  Origin origin = Origin::random;
};

using Population = std::vector<Individual>;

struct GpConfig {
  std::size_t population_size = 1024;
  double crossover_rate = 0.60;
  double mutation_rate = 0.30;
  double reproduction_rate = 0.10;
  std::size_t tournament_size = 7;
  std::size_t max_depth = kMaxTreeDepth;
  std::size_t init_min_depth = 2;
  std::size_t init_max_depth = 6;
  std::size_t mutation_max_depth = 4;
  std::size_t generations = 500;
  std::size_t variation_retries = 8;

  // Population 64, tournament 3, 30 generations.
  static GpConfig desk();
  // Throws std::invalid_argument when rates do not sum to one or M < 2.
  void validate() const;
};

// Random tree of exactly `depth` (full) or at most `depth` (grow). The root is
// an operator whenever depth > 0.
ExprTree random_tree(Rng& rng, std::size_t depth, bool full);

// Seeds deeper than the bound are replaced by random trees, with a notice
// appended to `notices`. Remaining slots are filled ramped half-and-half.
Population init_population(const GpConfig& config, const std::vector<ExprTree>& seeds, Rng& rng,
                           std::vector<std::string>* notices = nullptr);

// Replaces a random subtree of `a` with a random subtree of `b`. Falls back to
// a copy of `a` after `retries` depth-violating attempts.
ExprTree subtree_crossover(const ExprTree& a, const ExprTree& b, Rng& rng,
                           std::size_t max_depth = kMaxTreeDepth, std::size_t retries = 8);
ExprTree subtree_mutation(const ExprTree& a, Rng& rng, std::size_t max_depth = kMaxTreeDepth,
                          std::size_t subtree_depth = 4, std::size_t retries = 8);

// Mean TEU/h of a heuristic over a fixed instance set, memoized by the
// heuristic's prefix string. Distinct heuristics may be simulated on several
// threads; results do not depend on the thread count.
class FitnessEvaluator {
 public:
  explicit FitnessEvaluator(std::vector<std::shared_ptr<const TerminalInstance>> instances,
                            unsigned threads = 1);

  double fitness(const ExprTree& tree);
  void evaluate(Population& population);

  // Distinct heuristics simulated so far (cache misses).
  std::size_t evaluations() const { return evaluations_; }
  std::size_t simulations() const { return evaluations_ * instances_.size(); }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::shared_ptr<const TerminalInstance>>& instances() const {
    return instances_;
  }

 private:
  double simulate(const ExprTree& tree, std::string* error) const;

  std::vector<std::shared_ptr<const TerminalInstance>> instances_;
  unsigned threads_;
  std::unordered_map<std::string, double> cache_;
  std::size_t evaluations_ = 0;
  std::vector<std::string> failures_;
};

struct GenerationStats {
  std::size_t generation = 0;
  double best = 0.0;
  double mean = 0.0;
  double median = 0.0;
  std::size_t best_token_count = 0;
  std::size_t evaluations = 0;  // cumulative evaluator cache misses
};

// One GP run: population, RNG and generation counter. Advancing by k1 then
// k2 generations is identical to advancing by k1 + k2.
class GpRun {
 public:
  GpRun(GpConfig config, FitnessEvaluator& evaluator, std::uint64_t seed);

  void initialize(const std::vector<ExprTree>& seeds = {});
  void evolve(std::size_t generations);
  // Installs an externally assembled population (evaluating it) without
  // advancing the generation counter.
  void replace_population(Population population);

  const Population& population() const { return population_; }
  const Individual& best() const;
  std::size_t best_index() const;
  std::size_t generation() const { return generation_; }
  const std::vector<GenerationStats>& history() const { return history_; }
  const GpConfig& config() const { return config_; }
  const std::vector<std::string>& notices() const { return notices_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

  // Operator draws so far: crossover, mutation, reproduction.
  const std::array<std::size_t, 3>& operator_draws() const { return draws_; }

  // Restores a checkpointed state (see gp_io.hpp).
  void restore(std::size_t generation, const Rng& rng, Population population);

 private:
  std::size_t tournament();
  void record_stats();

  GpConfig config_;
  FitnessEvaluator* evaluator_;
  Rng rng_;
  Population population_;
  std::size_t generation_ = 0;
  std::vector<GenerationStats> history_;
  std::vector<std::string> notices_;
  std::array<std::size_t, 3> draws_{};
};

GenerationStats population_stats(const Population& population, std::size_t generation,
                                 std::size_t evaluations);

}  // namespace gprt

#endif  // GPRT_GP_HPP_
