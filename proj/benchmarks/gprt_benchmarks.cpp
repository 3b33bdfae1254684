#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gprt/dispatchers.hpp"
#include "gprt/expr_tree.hpp"
#include "gprt/gp.hpp"
#include "gprt/heuristic_io.hpp"
#include "gprt/instance_gen.hpp"
#include "gprt/policy.hpp"
#include "gprt/simulation.hpp"
#include "gprt/training.hpp"

namespace {

using namespace gprt;

const TerminalInstance& desk() {
  static const TerminalInstance inst = generate_instance(GeneratorConfig::desk(), 1);
  return inst;
}

void BM_SimulateFifo(benchmark::State& state) {
  GeneratorConfig c = GeneratorConfig::desk();
  c.tasks = static_cast<std::size_t>(state.range(0));
  const TerminalInstance inst = generate_instance(c, 1);
  const FifoDispatcher fifo;
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(inst, fifo, 0).teu_per_hour);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateFifo)->Arg(100)->Arg(400)->Arg(1600);

void BM_SimulateExpression(benchmark::State& state) {
  const ExprDispatcher d(from_polish(
      parse_tokens("if_else >= travel_time 5 * qc_bound_trucks qc_remaining_tasks 2")));
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(desk(), d, 0).teu_per_hour);
}
BENCHMARK(BM_SimulateExpression);

void BM_EvaluateTree(benchmark::State& state) {
  Rng rng(3);
  const ExprTree tree = random_tree(rng, static_cast<std::size_t>(state.range(0)), true);
  FeatureVector f;
  for (std::size_t i = 0; i < kFeatureCount; ++i) f[static_cast<Feature>(i)] = 1.0 + i;
  for (auto _ : state) benchmark::DoNotOptimize(eval_expr(tree, f));
}
BENCHMARK(BM_EvaluateTree)->Arg(3)->Arg(6);

void BM_EvaluateCompiled(benchmark::State& state) {
  Rng rng(3);
  const CompiledExpr program(random_tree(rng, static_cast<std::size_t>(state.range(0)), true));
  FeatureVector f;
  for (std::size_t i = 0; i < kFeatureCount; ++i) f[static_cast<Feature>(i)] = 1.0 + i;
  for (auto _ : state) benchmark::DoNotOptimize(program.evaluate(f));
}
BENCHMARK(BM_EvaluateCompiled)->Arg(3)->Arg(6);

void BM_GpGeneration(benchmark::State& state) {
  for (auto _ : state) {
    FitnessEvaluator ev({std::make_shared<const TerminalInstance>(desk())});
    GpRun gp(GpConfig::desk(), ev, 1);
    gp.initialize();
    gp.evolve(1);
    benchmark::DoNotOptimize(gp.best().fitness);
  }
}
BENCHMARK(BM_GpGeneration)->Unit(benchmark::kMillisecond);

PolicyConfig policy_config(int kind) {
  PolicyConfig c;
  c.kind = kind == 0 ? PolicyKind::lstm : PolicyKind::transformer;
  c.seed = 1;
  return c;
}

void BM_PolicySample(benchmark::State& state) {
  const auto policy = make_policy(policy_config(static_cast<int>(state.range(0))));
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(policy->sample(rng, 64).log_prob);
  state.SetLabel(std::string(policy_kind_name(policy->kind())));
}
BENCHMARK(BM_PolicySample)->Arg(0)->Arg(1);

void BM_PolicyTrainStep(benchmark::State& state) {
  const auto policy = make_policy(policy_config(static_cast<int>(state.range(0))));
  Rng rng(1);
  std::vector<Episode> batch;
  for (int i = 0; i < 64; ++i) batch.push_back({policy->sample(rng, 64).tokens, static_cast<double>(i)});
  TrainState train;
  for (auto _ : state) benchmark::DoNotOptimize(train_step(*policy, train, batch).loss);
  state.SetLabel(std::string(policy_kind_name(policy->kind())));
}
BENCHMARK(BM_PolicyTrainStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
