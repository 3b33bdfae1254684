#ifndef GPRT_HYBRID_HPP_
#define GPRT_HYBRID_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "gprt/gp.hpp"
#include "gprt/policy.hpp"
#include "gprt/training.hpp"

namespace gprt {

struct HybridConfig {
  PolicyKind policy_kind = PolicyKind::transformer;
  std::size_t cycle_generations = 20;  // K
  std::size_t population_size = 1024;  // M
  std::size_t seeded = 512;            // N
  std::size_t total_generations = 500;
  bool seeding_enabled = true;
  bool training_enabled = true;
  std::uint64_t seed = 0;

  GpConfig gp;  // population_size and generations are taken from the fields above
  PolicyConfig policy;
  std::size_t epochs = 4;
  std::size_t batch_size = 64;
  std::size_t max_len = 64;
  RewardOptions reward;

  // K 5, M 64, N 32, 30 generations, desk GP settings.
  static HybridConfig desk(PolicyKind kind);
  // Throws std::invalid_argument unless N <= M and K divides the total.
  void validate() const;
  std::size_t cycles() const { return total_generations / cycle_generations; }
  GpConfig gp_config() const;
};

struct HybridGeneration {
  GenerationStats stats;
  std::size_t cycle = 0;  // 1-based
  double delta = 0.0;
  double baseline = 0.0;
  double best_so_far = 0.0;
};

struct CycleAccounting {
  std::size_t gp_evaluations = 0;
  std::size_t policy_evaluations = 0;
  std::size_t train_steps = 0;
  std::size_t rejected_steps = 0;
};

struct HybridResult {
  Individual best{ExprTree::leaf(Token::constant(0)), std::nullopt, Origin::random};
  std::vector<HybridGeneration> history;
  std::vector<CycleAccounting> cycles;
  std::size_t evaluations = 0;  // evaluator cache misses during the run
  Population final_population;
  std::unique_ptr<SequencePolicy> policy;
  TrainState state;
  std::vector<std::string> notices;
};

// Policy seeds GP, GP evolves K generations, the GP population plus this
// cycle's samples train the policy; repeated until the generation budget.
// The policy has its own RNG stream, so with seeding and training disabled
// the GP trajectory equals GpRun::initialize + evolve(total) under `seed`.
HybridResult run_hybrid(const HybridConfig& config, FitnessEvaluator& evaluator);

// generation,best,mean,token_count_best,delta,baseline
void write_hybrid_log(std::ostream& out, const std::vector<HybridGeneration>& history);

struct TokenCountSummary {
  std::string method;
  std::size_t runs = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single run
};

TokenCountSummary report_token_counts(const std::string& method,
                                      const std::vector<Individual>& final_bests);
// method,runs,mean_tokens,sd_tokens
void write_token_counts(std::ostream& out, const std::vector<TokenCountSummary>& rows);

}  // namespace gprt

#endif  // GPRT_HYBRID_HPP_
