#ifndef GPRT_TRAINING_HPP_
#define GPRT_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gprt/dispatchers.hpp"
#include "gprt/gp.hpp"
#include "gprt/policy.hpp"
#include "gprt/simulation.hpp"

namespace gprt {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}
  void step(std::vector<double>& params, std::span<const double> grad);

  const AdamConfig& config() const { return config_; }
  std::uint64_t steps() const { return t_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }
  void restore(std::uint64_t steps, std::vector<double> m, std::vector<double> v);

 private:
  AdamConfig config_;
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

struct TrainState {
  Adam optimizer;
  double baseline = 0.0;
  double baseline_decay = 0.9;
  std::uint64_t episode = 0;  // completed training steps
  double kappa = 10.0;

  // Shaped-reward weight for the next step: kappa / en with en 1-based.
  double next_delta() const { return kappa / static_cast<double>(episode + 1); }
};

struct Episode {
  TokenSeq tokens;
  double reward = 0.0;
};

struct LossOptions {
  std::size_t max_len = 64;  // raised to the sequence length when shorter
  bool standardize = false;  // standardize advantages within the batch
};

struct VpgResult {
  double loss = 0.0;
  std::vector<double> gradient;
  std::vector<double> log_probs;  // per used episode
  std::size_t used = 0;
  std::size_t skipped = 0;  // longer than the policy can condition on
};

// Surrogate -(1/|T|) sum (R - b) log p(tau) and its exact gradient.
VpgResult vpg_loss(const SequencePolicy& policy, std::span<const Episode> batch, double baseline,
                   const LossOptions& options = {});

struct TrainStepResult {
  bool applied = false;
  double loss = 0.0;
  double mean_reward = 0.0;
  std::size_t used = 0;
  std::string message;  // reason when rejected
};

// One Adam step on the surrogate, then b <- decay * b + (1 - decay) * mean(R)
// and en <- en + 1. Non-finite rewards or gradients reject the step and leave
// the policy and state untouched.
TrainStepResult train_step(SequencePolicy& policy, TrainState& state,
                           std::span<const Episode> batch, const LossOptions& options = {});

struct ShapedReward {
  double timing = 0.0;      // sum of e_{i-1} - s_i over consecutive tasks of a truck
  double covariance = 0.0;  // sum over decisions of cov(O_r, O_m)
  double value = 0.0;       // timing -/+ delta * covariance
};

// Requires a result simulated with record_decisions. Ranks use the recorded
// scores (O_r) and the manual heuristic on the recorded features (O_m).
ShapedReward shaped_reward(const SimResult& result, const ManualDispatcher& manual, double delta,
                           bool subtract_covariance = true);

// Population covariance (divides by k) of two rank vectors; 0 when k < 2.
double rank_covariance(std::span<const std::size_t> a, std::span<const std::size_t> b);

struct RewardOptions {
  double lambda = 0.0;  // weight of the shaped reward added to fitness
  bool subtract_covariance = true;
};

// R = fitness + lambda * mean shaped reward over the instances.
double episode_reward(const ExprTree& tree, double fitness,
                      const std::vector<std::shared_ptr<const TerminalInstance>>& instances,
                      double delta, const RewardOptions& options);

struct StandaloneConfig {
  std::size_t budget = 1;  // distinct heuristic evaluations
  std::size_t batch_size = 64;
  std::size_t max_len = 64;
  std::uint64_t seed = 0;
  RewardOptions reward;
  std::size_t max_samples_factor = 20;  // stop after factor x budget samples
};

struct StandaloneResult {
  Individual best;
  std::vector<GenerationStats> history;  // one row per batch
  std::size_t samples = 0;
};

// Sample -> simulate -> reward -> train loop without GP.
StandaloneResult standalone_search(SequencePolicy& policy, TrainState& state,
                                   FitnessEvaluator& evaluator, const StandaloneConfig& config);

}  // namespace gprt

#endif  // GPRT_TRAINING_HPP_
