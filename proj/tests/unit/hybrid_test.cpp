#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "fixtures.hpp"
#include "gprt/hybrid.hpp"
#include "gprt/instance_gen.hpp"

using namespace gprt;
using namespace gprt::testing;

namespace {

HybridConfig small_hybrid(PolicyKind kind, std::uint64_t seed) {
  HybridConfig c = HybridConfig::desk(kind);
  c.cycle_generations = 2;
  c.population_size = 16;
  c.seeded = 8;
  c.total_generations = 6;
  c.seed = seed;
  c.batch_size = 16;
  c.epochs = 2;
  c.policy.hidden = 8;
  c.policy.embedding = 8;
  c.policy.width = 8;
  c.policy.ffn = 16;
  c.policy.layers = 1;
  return c;
}

FitnessEvaluator evaluator(std::uint64_t seed = 5) {
  return FitnessEvaluator({shared(generate_instance(small_config(2, 4, 6, 30), seed))});
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("hybrid configuration") {
  HybridConfig c;
  CHECK(c.cycle_generations == 20);
  CHECK(c.population_size == 1024);
  CHECK(c.seeded == 512);
  CHECK(c.total_generations == 500);
  CHECK(c.cycles() == 25);
  CHECK_NOTHROW(c.validate());

  const HybridConfig desk = HybridConfig::desk(PolicyKind::lstm);
  CHECK(desk.cycle_generations == 5);
  CHECK(desk.population_size == 64);
  CHECK(desk.seeded == 32);
  CHECK(desk.total_generations == 30);
  CHECK(desk.cycles() == 6);
  CHECK(desk.gp_config().population_size == 64);

  HybridConfig bad = desk;
  bad.seeded = 65;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = desk;
  bad.total_generations = 31;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("disabled seeding and training reduce to plain GP") {
  HybridConfig c = small_hybrid(PolicyKind::transformer, 11);
  c.seeding_enabled = false;
  c.training_enabled = false;
  FitnessEvaluator ev_h = evaluator(), ev_g = evaluator();
  const HybridResult h = run_hybrid(c, ev_h);

  GpRun gp(c.gp_config(), ev_g, c.seed);
  gp.initialize();
  gp.evolve(c.total_generations);

  REQUIRE(h.history.size() == gp.history().size());
  for (std::size_t g = 0; g < h.history.size(); ++g) {
    CHECK(same_bits(h.history[g].stats.best, gp.history()[g].best));
    CHECK(same_bits(h.history[g].stats.mean, gp.history()[g].mean));
    CHECK(h.history[g].stats.evaluations == gp.history()[g].evaluations);
  }
  REQUIRE(h.final_population.size() == gp.population().size());
  for (std::size_t i = 0; i < gp.population().size(); ++i) {
    CHECK(h.final_population[i].tree == gp.population()[i].tree);
  }
  CHECK(h.evaluations == ev_g.evaluations());
  CHECK(same_bits(h.best.fitness.value(), gp.best().fitness.value()));
}

TEST_CASE("ablation without seeding keeps the GP trajectory") {
  HybridConfig c = small_hybrid(PolicyKind::lstm, 4);
  c.seeding_enabled = false;
  FitnessEvaluator ev_h = evaluator(), ev_g = evaluator();
  const HybridResult h = run_hybrid(c, ev_h);
  GpRun gp(c.gp_config(), ev_g, c.seed);
  gp.initialize();
  gp.evolve(c.total_generations);
  REQUIRE(h.history.size() == gp.history().size());
  for (std::size_t g = 0; g < h.history.size(); ++g) {
    CHECK(same_bits(h.history[g].stats.best, gp.history()[g].best));
  }
  CHECK(h.state.episode > 0);
  CHECK(h.best.fitness.value() >= gp.best().fitness.value());
}

TEST_CASE("full hybrid run") {
  for (PolicyKind kind : {PolicyKind::lstm, PolicyKind::transformer}) {
    CAPTURE(policy_kind_name(kind));
    const HybridConfig c = small_hybrid(kind, 7);
    FitnessEvaluator ev = evaluator();
    const HybridResult r = run_hybrid(c, ev);

    CHECK(r.cycles.size() == 3);
    CHECK(r.history.size() == c.total_generations + 1);
    std::size_t predicted = 0;
    for (const CycleAccounting& a : r.cycles) {
      predicted += a.gp_evaluations + a.policy_evaluations;
      CHECK(a.policy_evaluations <= c.seeded);
      CHECK(a.train_steps == c.epochs * 2);
      CHECK(a.rejected_steps == 0);
    }
    CHECK(predicted == r.evaluations);
    CHECK(r.evaluations == ev.evaluations());

    for (std::size_t g = 1; g < r.history.size(); ++g) {
      CHECK(r.history[g].best_so_far >= r.history[g - 1].best_so_far);
      CHECK(r.history[g].cycle >= r.history[g - 1].cycle);
    }
    CHECK(r.best.fitness.value() >= r.history.back().best_so_far);
    CHECK(validate_prefix(to_polish(r.best.tree)));
    CHECK(r.state.episode == c.cycles() * c.epochs * 2);
    CHECK(r.history.back().delta == doctest::Approx(10.0 / (r.state.episode + 1)));

    FitnessEvaluator again = evaluator();
    const HybridResult r2 = run_hybrid(c, again);
    CHECK(same_bits(r2.best.fitness.value(), r.best.fitness.value()));
    CHECK(r2.policy->parameters() == r.policy->parameters());
  }
}

TEST_CASE("seeding changes the GP trajectory") {
  const HybridConfig seeded = small_hybrid(PolicyKind::lstm, 3);
  HybridConfig observer = seeded;
  observer.seeding_enabled = false;
  FitnessEvaluator ev_a = evaluator(), ev_b = evaluator();
  const HybridResult a = run_hybrid(seeded, ev_a), b = run_hybrid(observer, ev_b);
  REQUIRE(a.history.size() == b.history.size());
  bool differs = false;
  for (std::size_t g = 0; g < a.history.size(); ++g) {
    differs = differs || !same_bits(a.history[g].stats.mean, b.history[g].stats.mean);
  }
  CHECK(differs);
  CHECK(a.final_population.size() == seeded.population_size);
}

TEST_CASE("logs and token counts") {
  const TokenCountSummary one = report_token_counts("m", {Individual{parse("f1"), 1.0}});
  CHECK(one.mean == 1.0);
  CHECK(one.stddev == 0.0);
  CHECK(one.runs == 1);
  const TokenCountSummary branching = report_token_counts(
      "m", {Individual{parse("if_else >= f1 5 * f2 f3 2"), 1.0}});
  CHECK(branching.mean == 8.0);
  const TokenCountSummary mixed =
      report_token_counts("m", {Individual{parse("f1"), 1.0}, Individual{parse("+ f1 f2"), 1.0}});
  CHECK(mixed.mean == 2.0);
  CHECK(mixed.stddev == doctest::Approx(std::sqrt(2.0)));

  std::ostringstream tokens;
  write_token_counts(tokens, {one, branching});
  CHECK(tokens.str() == "method,runs,mean_tokens,sd_tokens\nm,1,1,0\nm,1,8,0\n");

  std::ostringstream log;
  write_hybrid_log(log, {HybridGeneration{}, HybridGeneration{}});
  std::istringstream lines(log.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "generation,best,mean,token_count_best,delta,baseline");
}
