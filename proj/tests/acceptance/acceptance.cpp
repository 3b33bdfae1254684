#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gprt/attention.hpp"
#include "gprt/brute_force.hpp"
#include "gprt/dispatchers.hpp"
#include "gprt/experiment.hpp"
#include "gprt/heuristic_io.hpp"
#include "gprt/hybrid.hpp"
#include "gprt/instance_gen.hpp"
#include "gprt/policy.hpp"
#include "gprt/schedule.hpp"
#include "gprt/simulation.hpp"
#include "gprt/training.hpp"

using namespace gprt;
using namespace gprt::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << x;
  return s.str();
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// Start/end times of one truck chain written directly from the travel and
// operation times, for instances where no crane is shared.
void chain_oracle(const TerminalInstance& inst, const std::vector<TaskId>& chain,
                  std::vector<double>& start, std::vector<double>& end) {
  NodeId at = kDepot;
  double free_at = 0.0;
  for (TaskId i : chain) {
    const TaskSpec& t = inst.task(i);
    start[i] = free_at + inst.travel(at, t.source);
    end[i] = start[i] + t.source_op_time + inst.travel(t.source, t.destination) +
             t.destination_op_time;
    free_at = end[i];
    at = t.destination;
  }
}

Outcome timing_oracle() {
  std::size_t checked = 0, mismatches = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const TerminalInstance inst = contention_free(seed, 8, 3);
    for (const auto& [name, dispatcher] : baseline_dispatchers(seed)) {
      const SimResult r = run_simulation(inst, *dispatcher, seed);
      const TimingPlan plan = plan_from_result(inst, r);
      const TaskTimes closed = compute_times(inst, plan);
      std::vector<double> start(inst.task_count()), end(inst.task_count());
      for (const auto& chain : plan.truck_chains) chain_oracle(inst, chain, start, end);
      for (TaskId i = 0; i < inst.task_count(); ++i) {
        const TaskRecord* rec = r.find(i);
        ++checked;
        if (!rec || rec->start != closed.start[i] || rec->end != closed.end[i] ||
            rec->start != start[i] || rec->end != end[i]) {
          ++mismatches;
        }
      }
    }
  }
  return {mismatches == 0, std::to_string(checked) + " task timings over 50 instances x 4 dispatchers, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome feasibility() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> qcs(1, 3), ycs(1, 5), trucks(1, 8), tasks(5, 60);
  std::size_t violations = 0, incomplete = 0;
  const std::size_t runs = 1000;
  for (std::size_t k = 0; k < runs; ++k) {
    GeneratorConfig c = small_config(qcs(rng), ycs(rng), trucks(rng), tasks(rng));
    c.swap_window = 3;
    const TerminalInstance inst = generate_instance(c, k + 1);
    std::unique_ptr<Dispatcher> owned;
    const std::size_t kind = k % 6;
    if (kind == 0) {
      owned = std::make_unique<ManualDispatcher>(ManualDispatcher::for_instance(inst));
    } else if (kind == 5) {
      owned = std::make_unique<ExprDispatcher>(random_tree(rng, 1 + k % 6, k % 2 == 0));
    } else {
      auto all = baseline_dispatchers(k);
      auto it = all.begin();
      std::advance(it, kind - 1);
      owned = std::move(it->second);
    }
    const SimResult r = run_simulation(inst, *owned, k);
    violations += validate_schedule(r, inst).size();
    incomplete += r.records.size() != inst.task_count();
  }
  return {violations == 0 && incomplete == 0,
          std::to_string(runs) + " simulations, " + std::to_string(violations) + " violations, " +
              std::to_string(incomplete) + " incomplete"};
}

Outcome brute_force_bound() {
  std::mt19937_64 rng(77);
  std::size_t above = 0, within = 0;
  double closest = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t trucks = 1 + seed % 2;
    const std::size_t tasks = 3 + seed % 3;
    const TerminalInstance inst = generate_instance(small_config(2, 2, trucks, tasks), seed);
    const double optimum = brute_force_optimum(inst).best_teu_per_hour;

    std::vector<double> scores;
    for (const auto& [name, d] : baseline_dispatchers(seed)) {
      scores.push_back(run_simulation(inst, *d, 0).teu_per_hour);
    }
    scores.push_back(run_simulation(inst, ManualDispatcher::for_instance(inst), 0).teu_per_hour);

    FitnessEvaluator ev({shared(inst)});
    GpRun gp(GpConfig::desk(), ev, seed);
    gp.initialize();
    gp.evolve(30);
    const double evolved = run_simulation(inst, ExprDispatcher(gp.best().tree), 0).teu_per_hour;
    scores.push_back(evolved);

    for (double s : scores) above += s > optimum;
    const double ratio = evolved / optimum;
    closest = std::max(closest, ratio);
    within += ratio >= 0.95;
  }
  return {above == 0 && within >= 1,
          std::to_string(above) + " dispatcher scores above the optimum; " + std::to_string(within) +
              "/20 evolved heuristics within 5% (best ratio " + fmt(closest) + ")"};
}

Outcome expression_layer() {
  std::mt19937_64 rng(5);
  std::size_t round_trip_failures = 0;
  for (int k = 0; k < 10000; ++k) {
    const ExprTree tree = random_tree(rng, k % 9, k % 2 == 0);
    const TokenSeq seq = to_polish(tree);
    if (!validate_prefix(seq) || !(from_polish(seq) == tree) ||
        !(from_polish(parse_tokens(format_tokens(seq))) == tree)) {
      ++round_trip_failures;
    }
  }

  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::size_t division_failures = 0, boolean_failures = 0;
  const double specials[] = {0.0, -0.0, 1.0, -1.0, 1e300, -1e300, 0.5};
  for (int k = 0; k < 10000; ++k) {
    const double a = k < 49 ? specials[k % 7] : u(rng);
    const double b = k < 49 ? specials[k / 7] : (k % 3 == 0 ? 0.0 : u(rng));
    if (apply_op(Op::div, a, 0.0) != 1.0 || apply_op(Op::div, a, -0.0) != 1.0) ++division_failures;
    for (Op op : {Op::ge, Op::le, Op::logical_and, Op::logical_or}) {
      const double r = apply_op(op, a, b);
      if (r != 0.0 && r != 1.0) ++boolean_failures;
    }
  }
  FeatureVector f;
  f[Feature::travel_time] = 42.0;
  if (eval_expr(parse("/ travel_time qc_remaining_tasks"), f) != 1.0) ++division_failures;

  return {round_trip_failures == 0 && division_failures == 0 && boolean_failures == 0,
          "10000 trees, " + std::to_string(round_trip_failures) + " round-trip failures, " +
              std::to_string(division_failures) + " division and " +
              std::to_string(boolean_failures) + " boolean violations"};
}

Outcome policy_validity() {
  std::size_t invalid = 0;
  double worst = 0.0;
  for (PolicyKind kind : {PolicyKind::lstm, PolicyKind::transformer}) {
    PolicyConfig c;
    c.kind = kind;
    c.seed = 3;
    const auto policy = make_policy(c);
    Rng rng(11);
    for (int k = 0; k < 10000; ++k) {
      const PolicySample s = policy->sample(rng, 64);
      bool ok = validate_prefix(s.tokens) && s.tokens.size() <= 64;
      if (ok) ok = from_polish(s.tokens).depth() <= c.max_depth;
      invalid += !ok;
      if (ok) worst = std::max(worst, std::abs(policy->log_prob(s.tokens, 64) - s.log_prob));
    }
  }
  return {invalid == 0 && worst <= 1e-10,
          "20000 samples, " + std::to_string(invalid) + " invalid, max |log_prob drift| " +
              fmt(worst)};
}

double fd_relative_error(SequencePolicy& policy, const std::vector<Episode>& batch, double b) {
  const VpgResult analytic = vpg_loss(policy, batch, b);
  const double h = 1e-4;
  double worst = 0.0;
  auto& theta = policy.parameters();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double keep = theta[i];
    theta[i] = keep + h;
    const double up = vpg_loss(policy, batch, b).loss;
    theta[i] = keep - h;
    const double down = vpg_loss(policy, batch, b).loss;
    theta[i] = keep;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic.gradient[i];
    worst = std::max(worst, std::abs(a - numeric) /
                                std::max({std::abs(a), std::abs(numeric), 1e-6}));
  }
  return worst;
}

Outcome gradient_checks() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> small(2, 5);
  std::uniform_real_distribution<double> reward(-2.0, 2.0);
  double worst = 0.0;
  std::size_t configs = 0;
  for (PolicyKind kind : {PolicyKind::lstm, PolicyKind::transformer}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      PolicyConfig c;
      c.kind = kind;
      c.seed = seed;
      c.embedding = small(rng);
      c.hidden = small(rng);
      c.layers = 1 + seed % 2;
      c.heads = 1 + seed % 2;
      c.width = c.heads * small(rng);
      c.ffn = 2 * small(rng);
      c.max_positions = 32;
      const auto policy = make_policy(c);
      std::vector<Episode> batch;
      Rng sampler(seed);
      while (batch.size() < 3) {
        const PolicySample s = policy->sample(sampler, 12);
        batch.push_back({s.tokens, reward(rng)});
      }
      worst = std::max(worst, fd_relative_error(*policy, batch, reward(rng)));
      ++configs;
    }
  }
  return {worst < 1e-4 && configs >= 10,
          std::to_string(configs) + " configurations, max relative error " + fmt(worst)};
}

Outcome attention_correctness() {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 3.0);
  auto random_matrix = [&](Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
    return m;
  };
  double worst_row = 0.0;
  std::size_t causal_breaks = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index len = 1 + trial % 12, dk = 1 + trial % 5, dv = 1 + trial % 3;
    const Matrix q = random_matrix(len, dk), k = random_matrix(len, dk), v = random_matrix(len, dv);
    for (bool causal : {false, true}) {
      Matrix w;
      attention(q, k, v, causal, &w);
      for (Eigen::Index i = 0; i < len; ++i) worst_row = std::max(worst_row, std::abs(w.row(i).sum() - 1.0));
    }
    const Matrix out = attention(q, k, v, true);
    const Eigen::Index t = trial % len;
    Matrix q2 = q, k2 = k, v2 = v;
    for (Eigen::Index i = t + 1; i < len; ++i) {
      q2.row(i) = random_matrix(1, dk);
      k2.row(i) = random_matrix(1, dk);
      v2.row(i) = random_matrix(1, dv);
    }
    const Matrix out2 = attention(q2, k2, v2, true);
    for (Eigen::Index i = 0; i <= t; ++i)
      for (Eigen::Index j = 0; j < dv; ++j) causal_breaks += !same_bits(out(i, j), out2(i, j));
  }

  PolicyConfig c;
  c.kind = PolicyKind::transformer;
  c.seed = 4;
  const auto policy = make_policy(c);
  Rng sampler(4);
  const auto& terminals = terminal_tokens();
  for (int trial = 0; trial < 100; ++trial) {
    const TokenSeq a = policy->sample(sampler, 32).tokens;
    std::vector<std::size_t> leaves;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].is_terminal()) leaves.push_back(i);
    const std::size_t p = leaves[static_cast<std::size_t>(trial) % leaves.size()];
    TokenSeq b = a;
    b[p] = terminals[(std::find(terminals.begin(), terminals.end(), a[p]) - terminals.begin() + 1) %
                     terminals.size()];
    const Matrix la = policy->forward_logits(a), lb = policy->forward_logits(b);
    for (std::size_t i = 0; i <= p; ++i)
      for (Eigen::Index j = 0; j < la.cols(); ++j)
        causal_breaks += !same_bits(la(static_cast<Eigen::Index>(i), j), lb(static_cast<Eigen::Index>(i), j));
  }
  return {worst_row <= 1e-9 && causal_breaks == 0,
          "max row-sum error " + fmt(worst_row) + ", " + std::to_string(causal_breaks) +
              " causal differences (attention and transformer logits)"};
}

Outcome overfit_sanity() {
  std::string detail;
  bool pass = true;
  for (PolicyKind kind : {PolicyKind::lstm, PolicyKind::transformer}) {
    PolicyConfig c;
    c.kind = kind;
    c.seed = 6;
    const auto policy = make_policy(c);
    TrainState state;
    const TokenSeq seq = parse_tokens("if_else >= travel_time 5 * qc_bound_trucks qc_remaining_tasks 2");
    const std::vector<Episode> batch = {{seq, 100.0}};
    double previous = policy->log_prob(seq, 64);
    const double first = previous;
    std::size_t increases = 0;
    for (int step = 0; step < 50; ++step) {
      if (!train_step(*policy, state, batch).applied) break;
      const double now = policy->log_prob(seq, 64);
      increases += now > previous;
      previous = now;
    }
    pass = pass && increases == 50;
    detail += std::string(policy_kind_name(kind)) + " " + std::to_string(increases) + "/50 increases (" +
              fmt(first) + " -> " + fmt(previous) + ") ";
  }
  return {pass, detail};
}

std::shared_ptr<const TerminalInstance> desk_instance() {
  return shared(generate_instance(GeneratorConfig::desk(), 1));
}

double cell(const ExperimentResult& r, Method m, std::uint64_t seed) {
  for (const Cell& c : r.cells)
    if (c.method == m && c.seed == seed && c.block == "train") return c.teu_per_hour;
  throw std::logic_error("missing cell");
}

const MethodRun& run_of(const ExperimentResult& r, Method m, std::uint64_t seed) {
  for (const MethodRun& run : r.runs)
    if (run.method == m && run.seed == seed) return run;
  throw std::logic_error("missing run");
}

// Best LGP fitness over the generations whose cumulative evaluations fit the
// budget of `rival` in the same repetition.
double lgp_at_budget_of(const ExperimentResult& r, Method rival, std::uint64_t seed) {
  const std::size_t budget = run_of(r, rival, seed).evaluations;
  double best = kFailedFitness;
  for (const GenerationStats& g : run_of(r, Method::lgp, seed).history)
    if (g.evaluations <= budget) best = std::max(best, g.best);
  return best;
}

const ExperimentResult& desk_comparison() {
  static std::optional<ExperimentResult> result;
  if (!result) {
    ExperimentPlan plan;
    plan.methods = {Method::manual, Method::fifo, Method::random, Method::lgp, Method::gprr,
                    Method::gprt, Method::rnn_standalone, Method::transformer_standalone};
    plan.train = {"desk"};
    plan.repetitions = 5;
    plan.budget_matched = true;
    result = run_experiment(plan, {{"desk", desk_instance()}}, {},
                            [](const std::string& line) { std::cerr << line << '\n'; });
  }
  return *result;
}

Outcome ordering_trend() {
  const ExperimentResult& r = desk_comparison();
  std::size_t gprt_wins = 0, gprr_wins = 0, baseline_wins = 0;
  std::ostringstream table;
  table << "\n  seed   gprr  lgp@gprr     gprt  lgp@gprt     fifo   random";
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double gprr = run_of(r, Method::gprr, seed).best.fitness.value();
    const double gprt = run_of(r, Method::gprt, seed).best.fitness.value();
    const double lgp_r = lgp_at_budget_of(r, Method::gprr, seed);
    const double lgp_t = lgp_at_budget_of(r, Method::gprt, seed);
    const double fifo = cell(r, Method::fifo, seed), random = cell(r, Method::random, seed);
    gprt_wins += gprt >= lgp_t;
    gprr_wins += gprr >= lgp_r;
    bool beats = true;
    for (Method m : {Method::lgp, Method::gprr, Method::gprt}) {
      const double v = cell(r, m, seed);
      beats = beats && v > fifo && v > random;
    }
    baseline_wins += beats;
    table << "\n  " << std::setw(4) << seed << std::fixed << std::setprecision(2);
    for (double v : {gprr, lgp_r, gprt, lgp_t, fifo, random}) table << std::setw(9) << v;
    table << std::defaultfloat;
  }
  return {gprt_wins >= 3 && gprr_wins >= 3 && baseline_wins == 5,
          "GPRT>=LGP " + std::to_string(gprt_wins) + "/5, GPRR>=LGP " + std::to_string(gprr_wins) +
              "/5 at equal evaluation budgets, GP methods beat FIFO and random " +
              std::to_string(baseline_wins) + "/5" + table.str()};
}

Outcome token_counts() {
  const ExperimentResult& r = desk_comparison();
  std::map<std::string, double> means;
  std::string detail;
  for (const TokenCountSummary& t : r.token_counts) {
    means[t.method] = t.mean;
    detail += t.method + " " + fmt(t.mean) + " (sd " + fmt(t.stddev) + "); ";
  }
  const bool pass = means.count("lgp") && means.count("rnn_standalone") &&
                    means.count("transformer_standalone") &&
                    means["rnn_standalone"] < means["lgp"] &&
                    means["transformer_standalone"] < means["lgp"];
  return {pass, detail};
}

Outcome ablation_reduction() {
  const auto inst = desk_instance();
  std::size_t mismatches = 0;
  for (PolicyKind kind : {PolicyKind::lstm, PolicyKind::transformer}) {
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
      HybridConfig c = HybridConfig::desk(kind);
      c.seed = seed;
      c.seeding_enabled = false;
      c.training_enabled = false;
      FitnessEvaluator ev_h({inst}), ev_g({inst});
      const HybridResult h = run_hybrid(c, ev_h);
      GpRun gp(c.gp_config(), ev_g, seed);
      gp.initialize();
      gp.evolve(c.total_generations);
      mismatches += h.history.size() != gp.history().size();
      for (std::size_t g = 0; g < std::min(h.history.size(), gp.history().size()); ++g) {
        mismatches += !same_bits(h.history[g].stats.best, gp.history()[g].best) ||
                      !same_bits(h.history[g].stats.mean, gp.history()[g].mean);
      }
      for (std::size_t i = 0; i < gp.population().size(); ++i) {
        mismatches += !(h.final_population[i].tree == gp.population()[i].tree);
      }
      mismatches += ev_h.evaluations() != ev_g.evaluations();
    }
  }

  ExperimentPlan plan;
  plan.methods = {Method::manual, Method::lgp, Method::gprr, Method::gprr_star, Method::gprt,
                  Method::gprt_star};
  plan.train = {"desk"};
  plan.repetitions = 3;
  const ExperimentResult r = run_experiment(plan, {{"desk", inst}}, {});
  bool finite = true;
  std::ostringstream table;
  for (const SummaryRow& row : r.summary) {
    if (row.set != "desk") continue;
    finite = finite && std::isfinite(row.mean_teu_per_hour) && row.mean_teu_per_hour > 0.0;
    table << "\n  " << std::left << std::setw(10) << method_name(row.method) << std::right
          << std::fixed << std::setprecision(2) << std::setw(8) << row.mean_teu_per_hour
          << std::setw(9) << row.improvement_pct.value_or(0.0) << "%" << std::defaultfloat;
  }
  return {mismatches == 0 && finite,
          std::to_string(mismatches) + " differences between disabled hybrid and plain GP (4 runs)" +
              table.str()};
}

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "Criteria to run (default all)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "timing oracle", 10, timing_oracle},
      {2, "feasibility", 120, feasibility},
      {3, "brute-force bound", 300, brute_force_bound},
      {4, "expression layer", 10, expression_layer},
      {5, "policy validity", 30, policy_validity},
      {6, "gradient checks", 60, gradient_checks},
      {7, "attention correctness", 5, attention_correctness},
      {8, "overfit sanity", 10, overfit_sanity},
      {9, "desk-scale ordering trend", 1800, ordering_trend},
      {10, "ablation reduction", 600, ablation_reduction},
      {11, "token-count report", 1800, token_counts},
  };
  std::set<int> wanted(selected.begin(), selected.end());
  if (wanted.count(9)) wanted.insert(11);
  if (wanted.empty())
    for (const Criterion& c : criteria) wanted.insert(c.id);

  bool all = true;
  double shared_run_s = 0.0;
  for (const Criterion& c : criteria) {
    if (!wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.id == 9) shared_run_s = seconds;
    if (c.id == 11) seconds += shared_run_s;
    const bool in_time = seconds < c.limit_s;
    const bool pass = o.pass && in_time;
    all = all && pass;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): "
              << o.detail << (in_time ? "" : " [over time limit]") << " [" << fmt(seconds, 3)
              << " s / " << c.limit_s << " s]" << std::endl;
  }
  return all ? 0 : 1;
}
