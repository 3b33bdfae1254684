#include "gprt/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace gprt {

namespace {

// Independent stream for the policy so GP draws are unaffected by sampling.
constexpr std::uint64_t kPolicyStream = 0x9e3779b97f4a7c15ULL;

double fitness_of(const Individual& ind) { return ind.fitness.value_or(kFailedFitness); }

Population top_survivors(const Population& pop, std::size_t count) {
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fitness_of(pop[a]) > fitness_of(pop[b]);
  });
  Population out;
  out.reserve(count);
  for (std::size_t i = 0; i < count && i < order.size(); ++i) out.push_back(pop[order[i]]);
  return out;
}

}  // namespace

HybridConfig HybridConfig::desk(PolicyKind kind) {
  HybridConfig c;
  c.policy_kind = kind;
  c.cycle_generations = 5;
  c.population_size = 64;
  c.seeded = 32;
  c.total_generations = 30;
  c.gp = GpConfig::desk();
  return c;
}

void HybridConfig::validate() const {
  if (seeded > population_size) throw std::invalid_argument("N must not exceed M");
  if (cycle_generations == 0) throw std::invalid_argument("K must be positive");
  if (total_generations % cycle_generations != 0) {
    throw std::invalid_argument("total generations must be divisible by K");
  }
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  gp_config().validate();
  PolicyConfig p = policy;
  p.kind = policy_kind;
  p.validate();
}

GpConfig HybridConfig::gp_config() const {
  GpConfig g = gp;
  g.population_size = population_size;
  g.generations = total_generations;
  return g;
}

HybridResult run_hybrid(const HybridConfig& config, FitnessEvaluator& evaluator) {
  config.validate();
  HybridResult out;
  PolicyConfig pc = config.policy;
  pc.kind = config.policy_kind;
  pc.seed = config.seed ^ kPolicyStream;
  out.policy = make_policy(pc);
  SequencePolicy& policy = *out.policy;
  TrainState& state = out.state;
  Rng policy_rng(config.seed ^ kPolicyStream);

  const std::size_t start = evaluator.evaluations();
  const bool sampling = config.seeding_enabled || config.training_enabled;
  const std::size_t max_len = std::min(config.max_len, policy.max_sequence_length());
  const LossOptions loss_options{max_len, true};
  GpRun gp(config.gp_config(), evaluator, config.seed);

  double best_so_far = kFailedFitness;
  bool have_best = false;
  auto consider = [&](const Individual& ind) {
    if (!have_best || fitness_of(ind) > fitness_of(out.best)) {
      out.best = ind;
      have_best = true;
    }
  };

  for (std::size_t cycle = 1; cycle <= config.cycles(); ++cycle) {
    CycleAccounting acc;

    // (1) policy samples
    Population samples;
    if (sampling) {
      const std::size_t before = evaluator.evaluations();
      samples.reserve(config.seeded);
      for (std::size_t i = 0; i < config.seeded; ++i) {
        PolicySample s = policy.sample(policy_rng, max_len);
        samples.push_back(Individual{from_polish(s.tokens), std::nullopt, Origin::nn_seeded});
      }
      evaluator.evaluate(samples);
      acc.policy_evaluations = evaluator.evaluations() - before;
      for (const Individual& s : samples) consider(s);
    }

    // (2) population for this cycle
    const std::size_t before_gp = evaluator.evaluations();
    const std::size_t history_before = cycle == 1 ? 0 : gp.history().size();
    if (cycle == 1) {
      std::vector<ExprTree> seeds;
      if (config.seeding_enabled) {
        for (const Individual& s : samples) seeds.push_back(s.tree);
      }
      gp.initialize(seeds);
    } else if (config.seeding_enabled) {
      Population next = top_survivors(gp.population(), config.population_size - config.seeded);
      for (const Individual& s : samples) next.push_back(s);
      gp.replace_population(std::move(next));
    }

    // (3) K generations of GP
    gp.evolve(config.cycle_generations);
    acc.gp_evaluations = evaluator.evaluations() - before_gp;
    for (const Individual& ind : gp.population()) consider(ind);

    // (4) train on the merged set
    if (config.training_enabled) {
      std::vector<Episode> merged;
      merged.reserve(gp.population().size() + samples.size());
      const double delta = state.next_delta();
      auto add = [&](const Individual& ind) {
        const double f = fitness_of(ind);
        if (!std::isfinite(f)) return;
        const double r = episode_reward(ind.tree, f, evaluator.instances(), delta, config.reward);
        merged.push_back(Episode{to_polish(ind.tree), r});
      };
      for (const Individual& ind : gp.population()) add(ind);
      for (const Individual& ind : samples) add(ind);
      std::vector<std::size_t> order(merged.size());
      std::iota(order.begin(), order.end(), 0);
      for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), policy_rng);
        for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
          std::vector<Episode> batch;
          for (std::size_t i = b; i < std::min(order.size(), b + config.batch_size); ++i) {
            batch.push_back(merged[order[i]]);
          }
          const TrainStepResult r = train_step(policy, state, batch, loss_options);
          ++acc.train_steps;
          if (!r.applied) {
            ++acc.rejected_steps;
            out.notices.push_back("cycle " + std::to_string(cycle) + ": step rejected (" +
                                  r.message + ")");
          }
        }
      }
    }

    for (std::size_t i = history_before; i < gp.history().size(); ++i) {
      HybridGeneration row;
      row.stats = gp.history()[i];
      row.cycle = cycle;
      row.delta = state.next_delta();
      row.baseline = state.baseline;
      best_so_far = std::max(best_so_far, row.stats.best);
      row.best_so_far = best_so_far;
      out.history.push_back(row);
    }
    out.cycles.push_back(acc);
  }

  out.evaluations = evaluator.evaluations() - start;
  std::size_t predicted = 0;
  for (const CycleAccounting& c : out.cycles) predicted += c.gp_evaluations + c.policy_evaluations;
  if (predicted != out.evaluations) throw std::logic_error("hybrid evaluation accounting mismatch");
  for (const std::string& n : gp.notices()) out.notices.push_back(n);
  out.final_population = gp.population();
  return out;
}

void write_hybrid_log(std::ostream& out, const std::vector<HybridGeneration>& history) {
  out << "generation,best,mean,token_count_best,delta,baseline\n";
  for (const HybridGeneration& h : history) {
    out << h.stats.generation << ',' << h.stats.best << ',' << h.stats.mean << ','
        << h.stats.best_token_count << ',' << h.delta << ',' << h.baseline << '\n';
  }
}

TokenCountSummary report_token_counts(const std::string& method,
                                      const std::vector<Individual>& final_bests) {
  TokenCountSummary s;
  s.method = method;
  s.runs = final_bests.size();
  if (final_bests.empty()) return s;
  double sum = 0.0;
  for (const Individual& ind : final_bests) sum += static_cast<double>(ind.tree.token_count());
  s.mean = sum / static_cast<double>(s.runs);
  if (s.runs > 1) {
    double var = 0.0;
    for (const Individual& ind : final_bests) {
      const double d = static_cast<double>(ind.tree.token_count()) - s.mean;
      var += d * d;
    }
    s.stddev = std::sqrt(var / static_cast<double>(s.runs - 1));
  }
  return s;
}

void write_token_counts(std::ostream& out, const std::vector<TokenCountSummary>& rows) {
  out << "method,runs,mean_tokens,sd_tokens\n";
  for (const TokenCountSummary& r : rows) {
    out << r.method << ',' << r.runs << ',' << r.mean << ',' << r.stddev << '\n';
  }
}

}  // namespace gprt
