#include "gprt/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace gprt {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void Adam::step(std::vector<double>& params, std::span<const double> grad) {
  if (grad.size() != params.size()) throw std::invalid_argument("Adam: gradient size mismatch");
  if (m_.size() != params.size()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
  }
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grad[i];
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
    params[i] -= config_.learning_rate * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + config_.epsilon);
  }
}

void Adam::restore(std::uint64_t steps, std::vector<double> m, std::vector<double> v) {
  if (m.size() != v.size()) throw std::invalid_argument("Adam: moment size mismatch");
  t_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

VpgResult vpg_loss(const SequencePolicy& policy, std::span<const Episode> batch, double baseline,
                   const LossOptions& options) {
  if (batch.empty()) throw std::invalid_argument("policy-gradient batch is empty");
  VpgResult out;
  out.gradient.assign(policy.parameters().size(), 0.0);
  std::vector<const Episode*> used;
  for (const Episode& e : batch) {
    if (e.tokens.size() > policy.max_sequence_length()) {
      ++out.skipped;
      continue;
    }
    used.push_back(&e);
  }
  out.used = used.size();
  if (used.empty()) return out;

  std::vector<double> adv;
  adv.reserve(used.size());
  for (const Episode* e : used) adv.push_back(e->reward - baseline);
  if (options.standardize && adv.size() > 1) {
    const double n = static_cast<double>(adv.size());
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / n);
    for (double& a : adv) a = sd > 1e-12 ? (a - mean) / sd : 0.0;
  }

  const double scale = 1.0 / static_cast<double>(used.size());
  for (std::size_t i = 0; i < used.size(); ++i) {
    const TokenSeq& seq = used[i]->tokens;
    const std::size_t max_len = std::max(options.max_len, seq.size());
    const double lp = policy.accumulate_gradient(seq, max_len, -adv[i] * scale, out.gradient);
    out.log_probs.push_back(lp);
    out.loss -= adv[i] * lp * scale;
  }
  return out;
}

TrainStepResult train_step(SequencePolicy& policy, TrainState& state,
                           std::span<const Episode> batch, const LossOptions& options) {
  TrainStepResult r;
  if (batch.empty()) {
    r.message = "empty batch";
    return r;
  }
  for (const Episode& e : batch) {
    if (!std::isfinite(e.reward)) {
      r.message = "non-finite reward";
      return r;
    }
  }
  VpgResult loss = vpg_loss(policy, batch, state.baseline, options);
  r.loss = loss.loss;
  r.used = loss.used;
  if (!std::isfinite(loss.loss) || !all_finite(loss.gradient)) {
    r.message = "non-finite gradient";
    return r;
  }
  double sum = 0.0;
  for (const Episode& e : batch) sum += e.reward;
  r.mean_reward = sum / static_cast<double>(batch.size());
  state.optimizer.step(policy.parameters(), loss.gradient);
  state.baseline = state.baseline_decay * state.baseline + (1.0 - state.baseline_decay) * r.mean_reward;
  ++state.episode;
  r.applied = true;
  return r;
}

double rank_covariance(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("rank vectors differ in length");
  if (a.size() < 2) return 0.0;
  const double k = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += static_cast<double>(a[i]);
    mb += static_cast<double>(b[i]);
  }
  ma /= k;
  mb /= k;
  double c = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    c += (static_cast<double>(a[i]) - ma) * (static_cast<double>(b[i]) - mb);
  }
  return c / k;
}

ShapedReward shaped_reward(const SimResult& result, const ManualDispatcher& manual, double delta,
                           bool subtract_covariance) {
  ShapedReward out;
  std::unordered_map<TaskId, const TaskRecord*> by_task;
  for (const TaskRecord& r : result.records) by_task.emplace(r.task, &r);
  for (const TaskRecord& r : result.records) {
    if (!r.previous_on_truck) continue;
    out.timing += by_task.at(*r.previous_on_truck)->end - r.start;
  }
  for (const DecisionRecord& d : result.decisions) {
    const std::size_t k = d.candidates.size();
    if (k < 2) continue;
    std::vector<double> learned(k), reference(k);
    std::vector<TaskId> tasks(k);
    const DecisionPoint point{d.index, d.time, d.truck, 0};
    for (std::size_t i = 0; i < k; ++i) {
      const CandidateLog& c = d.candidates[i];
      tasks[i] = c.task;
      learned[i] = c.score;
      reference[i] = manual.score(point, Candidate{c.task, c.quay, c.features});
    }
    out.covariance += rank_covariance(rank_candidates(learned, tasks), rank_candidates(reference, tasks));
  }
  out.value = subtract_covariance ? out.timing - delta * out.covariance
                                  : out.timing + delta * out.covariance;
  return out;
}

double episode_reward(const ExprTree& tree, double fitness,
                      const std::vector<std::shared_ptr<const TerminalInstance>>& instances,
                      double delta, const RewardOptions& options) {
  if (options.lambda == 0.0 || !std::isfinite(fitness)) return fitness;
  const ExprDispatcher dispatcher(tree);
  double shaped = 0.0;
  for (const auto& inst : instances) {
    const SimResult res = run_simulation(*inst, dispatcher, inst->seed(), SimOptions{true});
    shaped += shaped_reward(res, ManualDispatcher::for_instance(*inst), delta,
                            options.subtract_covariance)
                  .value;
  }
  return fitness + options.lambda * shaped / static_cast<double>(instances.size());
}

StandaloneResult standalone_search(SequencePolicy& policy, TrainState& state,
                                   FitnessEvaluator& evaluator, const StandaloneConfig& config) {
  if (config.budget < 1) throw std::invalid_argument("budget must be >= 1");
  if (config.batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  Rng rng(config.seed);
  StandaloneResult out{Individual{ExprTree::leaf(Token::constant(0)), kFailedFitness, Origin::nn_seeded},
                       {}, 0};
  bool have_best = false;
  const std::size_t start = evaluator.evaluations();
  const std::size_t max_samples = config.max_samples_factor * config.budget;
  const std::size_t max_len = std::min(config.max_len, policy.max_sequence_length());
  const LossOptions loss_options{max_len, true};
  while (evaluator.evaluations() - start < config.budget && out.samples < max_samples) {
    const std::size_t room = config.budget - (evaluator.evaluations() - start);
    const std::size_t n = std::min({config.batch_size, room, max_samples - out.samples});
    std::vector<Episode> batch;
    std::vector<double> finite;
    for (std::size_t i = 0; i < n; ++i) {
      PolicySample s = policy.sample(rng, max_len);
      ++out.samples;
      ExprTree tree = from_polish(s.tokens);
      const double f = evaluator.fitness(tree);
      if (!have_best || f > *out.best.fitness) {
        out.best = Individual{tree, f, Origin::nn_seeded};
        have_best = true;
      }
      if (std::isfinite(f)) {
        finite.push_back(f);
        const double reward =
            episode_reward(tree, f, evaluator.instances(), state.next_delta(), config.reward);
        batch.push_back(Episode{std::move(s.tokens), reward});
      }
    }
    if (!batch.empty()) train_step(policy, state, batch, loss_options);
    GenerationStats g;
    g.generation = out.history.size() + 1;
    g.best = *out.best.fitness;
    if (!finite.empty()) {
      std::sort(finite.begin(), finite.end());
      const std::size_t m = finite.size();
      g.mean = std::accumulate(finite.begin(), finite.end(), 0.0) / static_cast<double>(m);
      g.median = m % 2 ? finite[m / 2] : 0.5 * (finite[m / 2 - 1] + finite[m / 2]);
    }
    g.best_token_count = out.best.tree.token_count();
    g.evaluations = evaluator.evaluations() - start;
    out.history.push_back(g);
  }
  return out;
}

}  // namespace gprt
