#include "gprt/gp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "gprt/dispatchers.hpp"
#include "gprt/simulation.hpp"

namespace gprt {

namespace {

constexpr std::array<std::string_view, 5> kOriginNames = {"random", "crossover", "mutation",
                                                          "reproduction", "nn_seeded"};

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

ExprNode random_node(Rng& rng, std::size_t depth, bool full, bool root) {
  if (depth == 0) return ExprNode{pick(terminal_tokens(), rng), {}};
  Token t = (full || root) ? pick(operator_tokens(), rng) : pick(all_tokens(), rng);
  ExprNode node{t, {}};
  for (int k = 0; k < t.arity(); ++k) node.children.push_back(random_node(rng, depth - 1, full, false));
  return node;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

std::string_view origin_name(Origin origin) { return kOriginNames[static_cast<std::size_t>(origin)]; }

std::optional<Origin> parse_origin(std::string_view name) {
  for (std::size_t i = 0; i < kOriginNames.size(); ++i) {
    if (kOriginNames[i] == name) return static_cast<Origin>(i);
  }
  return std::nullopt;
}

GpConfig GpConfig::desk() {
  GpConfig c;
  c.population_size = 64;
  c.tournament_size = 3;
  c.generations = 30;
  return c;
}

void GpConfig::validate() const {
  if (population_size < 2) throw std::invalid_argument("population size must be >= 2");
  const double sum = crossover_rate + mutation_rate + reproduction_rate;
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("operator rates must sum to 1");
  if (crossover_rate < 0 || mutation_rate < 0 || reproduction_rate < 0) {
    throw std::invalid_argument("operator rates must be nonnegative");
  }
  if (tournament_size < 1) throw std::invalid_argument("tournament size must be >= 1");
  if (init_min_depth > init_max_depth || init_max_depth > max_depth) {
    throw std::invalid_argument("initial depth range must lie within the depth bound");
  }
}

ExprTree random_tree(Rng& rng, std::size_t depth, bool full) {
  return ExprTree(random_node(rng, depth, full, true));
}

Population init_population(const GpConfig& config, const std::vector<ExprTree>& seeds, Rng& rng,
                           std::vector<std::string>* notices) {
  config.validate();
  if (seeds.size() > config.population_size) {
    throw std::invalid_argument("more seeds than population slots");
  }
  Population pop;
  pop.reserve(config.population_size);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i].depth() > config.max_depth) {
      if (notices) {
        notices->push_back("seed " + std::to_string(i) + " has depth " +
                           std::to_string(seeds[i].depth()) + " > " +
                           std::to_string(config.max_depth) + "; replaced by a random tree");
      }
      continue;
    }
    pop.push_back(Individual{seeds[i], std::nullopt, Origin::nn_seeded});
  }
  const std::size_t depths = config.init_max_depth - config.init_min_depth + 1;
  for (std::size_t k = 0; pop.size() < config.population_size; ++k) {
    const std::size_t depth = config.init_min_depth + (k / 2) % depths;
    const bool full = k % 2 == 0;
    pop.push_back(Individual{random_tree(rng, depth, full), std::nullopt, Origin::random});
  }
  return pop;
}

ExprTree subtree_crossover(const ExprTree& a, const ExprTree& b, Rng& rng, std::size_t max_depth,
                           std::size_t retries) {
  for (std::size_t attempt = 0; attempt < retries; ++attempt) {
    const std::size_t at = uniform_index(rng, a.token_count());
    const std::size_t from = uniform_index(rng, b.token_count());
    const ExprTree donor(b.node_at(from));
    if (a.node_depth(at) + donor.depth() <= max_depth) {
      return a.with_subtree(at, donor.root());
    }
  }
  return a;
}

ExprTree subtree_mutation(const ExprTree& a, Rng& rng, std::size_t max_depth,
                          std::size_t subtree_depth, std::size_t retries) {
  for (std::size_t attempt = 0; attempt < retries; ++attempt) {
    const std::size_t at = uniform_index(rng, a.token_count());
    const std::size_t room = max_depth - std::min(max_depth, a.node_depth(at));
    const std::size_t depth =
        std::uniform_int_distribution<std::size_t>(0, std::min(subtree_depth, room))(rng);
    ExprTree fresh = random_tree(rng, depth, false);
    if (a.node_depth(at) + fresh.depth() <= max_depth) return a.with_subtree(at, fresh.root());
  }
  return a;
}

FitnessEvaluator::FitnessEvaluator(std::vector<std::shared_ptr<const TerminalInstance>> instances,
                                   unsigned threads)
    : instances_(std::move(instances)), threads_(std::max(1u, threads)) {
  if (instances_.empty()) throw std::invalid_argument("fitness needs at least one instance");
}

double FitnessEvaluator::simulate(const ExprTree& tree, std::string* error) const {
  try {
    const ExprDispatcher dispatcher(tree);
    double sum = 0.0;
    for (const auto& inst : instances_) sum += run_simulation(*inst, dispatcher, inst->seed()).teu_per_hour;
    return sum / static_cast<double>(instances_.size());
  } catch (const std::exception& e) {
    if (error) *error = e.what();
    return kFailedFitness;
  }
}

double FitnessEvaluator::fitness(const ExprTree& tree) {
  const std::string key = to_string(to_polish(tree));
  if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
  std::string error;
  const double f = simulate(tree, &error);
  if (!error.empty()) failures_.push_back(key + ": " + error);
  ++evaluations_;
  cache_.emplace(key, f);
  return f;
}

void FitnessEvaluator::evaluate(Population& population) {
  // Unique uncached heuristics in first-seen order.
  std::vector<std::string> keys(population.size());
  std::vector<std::size_t> jobs;
  std::unordered_map<std::string, std::size_t> pending;
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (population[i].fitness) continue;
    keys[i] = to_string(to_polish(population[i].tree));
    if (cache_.count(keys[i]) || pending.count(keys[i])) continue;
    pending.emplace(keys[i], i);
    jobs.push_back(i);
  }

  std::vector<double> results(jobs.size(), 0.0);
  std::vector<std::string> errors(jobs.size());
  const unsigned workers = std::min<unsigned>(threads_, static_cast<unsigned>(jobs.size()));
  if (workers <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) results[j] = simulate(population[jobs[j]].tree, &errors[j]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
          results[j] = simulate(population[jobs[j]].tree, &errors[j]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    cache_.emplace(keys[jobs[j]], results[j]);
    if (!errors[j].empty()) failures_.push_back(keys[jobs[j]] + ": " + errors[j]);
  }
  evaluations_ += jobs.size();

  for (std::size_t i = 0; i < population.size(); ++i) {
    if (!population[i].fitness) population[i].fitness = cache_.at(keys[i]);
  }
}

GenerationStats population_stats(const Population& population, std::size_t generation,
                                 std::size_t evaluations) {
  GenerationStats s;
  s.generation = generation;
  s.evaluations = evaluations;
  std::vector<double> f;
  f.reserve(population.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < population.size(); ++i) {
    const double v = population[i].fitness.value_or(kFailedFitness);
    f.push_back(v);
    if (v > f[best]) best = i;
  }
  if (f.empty()) return s;
  s.best = f[best];
  s.best_token_count = population[best].tree.token_count();
  std::vector<double> finite;
  for (double v : f) {
    if (std::isfinite(v)) finite.push_back(v);
  }
  if (!finite.empty()) {
    s.mean = std::accumulate(finite.begin(), finite.end(), 0.0) / static_cast<double>(finite.size());
    std::sort(finite.begin(), finite.end());
    const std::size_t m = finite.size();
    s.median = m % 2 ? finite[m / 2] : 0.5 * (finite[m / 2 - 1] + finite[m / 2]);
  }
  return s;
}

GpRun::GpRun(GpConfig config, FitnessEvaluator& evaluator, std::uint64_t seed)
    : config_(std::move(config)), evaluator_(&evaluator), rng_(seed) {
  config_.validate();
}

void GpRun::initialize(const std::vector<ExprTree>& seeds) {
  population_ = init_population(config_, seeds, rng_, &notices_);
  evaluator_->evaluate(population_);
  generation_ = 0;
  history_.clear();
  record_stats();
}

void GpRun::replace_population(Population population) {
  population_ = std::move(population);
  evaluator_->evaluate(population_);
}

void GpRun::restore(std::size_t generation, const Rng& rng, Population population) {
  generation_ = generation;
  rng_ = rng;
  population_ = std::move(population);
  evaluator_->evaluate(population_);
}

std::size_t GpRun::best_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < population_.size(); ++i) {
    if (population_[i].fitness.value_or(kFailedFitness) >
        population_[best].fitness.value_or(kFailedFitness)) {
      best = i;
    }
  }
  return best;
}

const Individual& GpRun::best() const { return population_.at(best_index()); }

std::size_t GpRun::tournament() {
  std::size_t winner = uniform_index(rng_, population_.size());
  for (std::size_t k = 1; k < config_.tournament_size; ++k) {
    const std::size_t c = uniform_index(rng_, population_.size());
    const double fc = population_[c].fitness.value_or(kFailedFitness);
    const double fw = population_[winner].fitness.value_or(kFailedFitness);
    if (fc > fw || (fc == fw && c < winner)) winner = c;
  }
  return winner;
}

void GpRun::record_stats() {
  history_.push_back(population_stats(population_, generation_, evaluator_->evaluations()));
}

void GpRun::evolve(std::size_t generations) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t g = 0; g < generations; ++g) {
    Population next;
    next.reserve(config_.population_size);
    next.push_back(population_[best_index()]);  // elitism
    while (next.size() < config_.population_size) {
      const double r = coin(rng_);
      if (r < config_.crossover_rate) {
        ++draws_[0];
        const Individual& a = population_[tournament()];
        const Individual& b = population_[tournament()];
        ExprTree child = subtree_crossover(a.tree, b.tree, rng_, config_.max_depth,
                                           config_.variation_retries);
        next.push_back(Individual{std::move(child), std::nullopt, Origin::crossover});
      } else if (r < config_.crossover_rate + config_.mutation_rate) {
        ++draws_[1];
        const Individual& a = population_[tournament()];
        ExprTree child = subtree_mutation(a.tree, rng_, config_.max_depth,
                                          config_.mutation_max_depth, config_.variation_retries);
        next.push_back(Individual{std::move(child), std::nullopt, Origin::mutation});
      } else {
        ++draws_[2];
        Individual copy = population_[tournament()];
        copy.origin = Origin::reproduction;
        next.push_back(std::move(copy));
      }
    }
    evaluator_->evaluate(next);
    population_ = std::move(next);
    ++generation_;
    record_stats();
  }
}

}  // namespace gprt
