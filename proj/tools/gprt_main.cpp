// gprt: instance generation, experiment plans, single training runs,
// training curves and summary reports.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "gprt/csv.hpp"
#include "gprt/dispatchers.hpp"
#include "gprt/experiment.hpp"
#include "gprt/gp_io.hpp"
#include "gprt/heuristic_io.hpp"
#include "gprt/hybrid.hpp"
#include "gprt/instance_gen.hpp"
#include "gprt/instance_io.hpp"
#include "gprt/policy_io.hpp"
#include "gprt/schedule.hpp"
#include "gprt/training.hpp"

namespace fs = std::filesystem;
using namespace gprt;

namespace {

struct GenArgs {
  std::uint64_t seed = 1;
  std::string out;
  bool desk = false;
  std::size_t qcs = 10, ycs = 20, trucks = 60, tasks = 4000, q = 3;
};

int cmd_gen(const GenArgs& a) {
  GeneratorConfig c = a.desk ? GeneratorConfig::desk() : GeneratorConfig::port_scale();
  if (!a.desk) {
    c.quay_cranes = a.qcs;
    c.yard_cranes = a.ycs;
    c.trucks = a.trucks;
    c.tasks = a.tasks;
  }
  c.swap_window = a.q;
  const TerminalInstance inst = generate_instance(c, a.seed);
  if (a.out.empty() || a.out == "-") {
    write_instance(std::cout, inst);
  } else {
    write_instance(fs::path(a.out), inst);
    std::cout << "wrote " << a.out << " (" << inst.task_count() << " tasks, "
              << inst.truck_count() << " trucks)\n";
  }
  return 0;
}

void print_summary(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << std::left << std::setw(6) << "block" << std::setw(24) << "set" << std::setw(24) << "method"
     << std::right << std::setw(12) << "TEU/h" << std::setw(10) << "Imp." << '\n';
  for (const SummaryRow& r : rows) {
    os << std::left << std::setw(6) << r.block << std::setw(24) << r.set << std::setw(24)
       << method_name(r.method) << std::right << std::setw(12) << std::fixed << std::setprecision(2)
       << r.mean_teu_per_hour;
    if (r.improvement_pct) {
      os << std::setw(9) << *r.improvement_pct << '%';
    }
    os << '\n';
  }
  os.unsetf(std::ios::floatfield);
}

struct RunArgs {
  std::string plan;
  std::string out = "results";
  bool desk = false;
  std::vector<std::string> methods;
  std::optional<std::uint64_t> seed;
};

int cmd_run(const RunArgs& a) {
  ExperimentPlan plan = read_plan(fs::path(a.plan));
  if (a.desk) plan.desk = true;
  if (!a.methods.empty()) {
    plan.methods.clear();
    for (const std::string& m : a.methods) {
      const auto parsed = parse_method(m);
      if (!parsed) throw std::invalid_argument("unknown method '" + m + "'");
      plan.methods.push_back(*parsed);
    }
    plan.comparisons.clear();
  }
  if (a.seed) {
    plan.seeds.clear();
    for (std::size_t i = 0; i < plan.repetitions; ++i) plan.seeds.push_back(*a.seed + i);
  }
  plan.validate();
  const ExperimentResult r =
      run_plan_files(plan, fs::path(a.out), [](const std::string& s) { std::cerr << "[run] " << s << '\n'; });
  print_summary(std::cout, r.summary);
  return 0;
}

struct TrainArgs {
  std::vector<std::string> instances;
  std::string method = "gprt";
  std::uint64_t seed = 1;
  std::string out = "train";
  bool desk = false;
  unsigned threads = 1;
  double lambda = 0.0;
};

int cmd_train(const TrainArgs& a) {
  const auto method = parse_method(a.method);
  if (!method || !is_learned(*method)) {
    throw std::invalid_argument("train needs a learned method (lgp, gprr, gprt, gprr_star, "
                                "gprt_star, rnn_standalone, transformer_standalone)");
  }
  std::vector<std::shared_ptr<const TerminalInstance>> instances;
  for (const std::string& f : a.instances) {
    instances.push_back(std::make_shared<const TerminalInstance>(read_instance(fs::path(f))));
  }
  ExperimentPlan plan;
  plan.methods = {*method};
  plan.train = a.instances;
  plan.desk = a.desk;
  FitnessEvaluator ev(instances, a.threads);
  fs::create_directories(a.out);
  nlohmann::json manifest;
  manifest["method"] = a.method;
  manifest["seed"] = a.seed;
  manifest["desk"] = a.desk;
  for (const std::string& f : a.instances) manifest["instance_hashes"][f] = file_hash(f);

  Individual best{ExprTree::leaf(Token::constant(0)), std::nullopt, Origin::random};
  std::ofstream history(fs::path(a.out) / "history.csv");
  if (is_hybrid(*method)) {
    HybridConfig cfg = plan.hybrid_config(*method, a.seed);
    cfg.reward.lambda = a.lambda;
    const HybridResult r = run_hybrid(cfg, ev);
    write_hybrid_log(history, r.history);
    save_policy(fs::path(a.out) / "policy.ckpt", *r.policy, r.state);
    best = r.best;
    manifest["config"] = {{"policy", std::string(policy_kind_name(cfg.policy_kind))},
                          {"K", cfg.cycle_generations},
                          {"M", cfg.population_size},
                          {"N", cfg.seeded},
                          {"total_generations", cfg.total_generations},
                          {"seeding_enabled", cfg.seeding_enabled},
                          {"training_enabled", cfg.training_enabled},
                          {"lambda", cfg.reward.lambda}};
    for (const std::string& n : r.notices) std::cerr << "[train] " << n << '\n';
  } else if (*method == Method::lgp) {
    const MethodRun r = run_lgp(plan.gp_config(), ev, a.seed);
    write_gp_log(history, r.history);
    best = r.best;
  } else {
    PolicyConfig pc;
    pc.kind = *method == Method::rnn_standalone ? PolicyKind::lstm : PolicyKind::transformer;
    pc.seed = a.seed;
    auto policy = make_policy(pc);
    TrainState state;
    StandaloneConfig sc;
    const GpConfig gp = plan.gp_config();
    sc.budget = gp.population_size * (gp.generations + 1);
    sc.seed = a.seed;
    sc.reward.lambda = a.lambda;
    const StandaloneResult r = standalone_search(*policy, state, ev, sc);
    write_gp_log(history, r.history);
    save_policy(fs::path(a.out) / "policy.ckpt", *policy, state);
    best = r.best;
  }
  manifest["evaluations"] = ev.evaluations();
  manifest["best_fitness"] = best.fitness.value_or(kFailedFitness);
  manifest["best_tokens"] = best.tree.token_count();
  std::ofstream(fs::path(a.out) / "manifest.json") << manifest.dump(2) << '\n';
  write_heuristics(fs::path(a.out) / "best.txt", {best.tree},
                   a.method + " seed " + std::to_string(a.seed));
  std::cout << a.method << " best TEU/h " << best.fitness.value_or(kFailedFitness) << " ("
            << best.tree.token_count() << " tokens, " << ev.evaluations() << " evaluations)\n";
  return 0;
}

int cmd_curves(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<MethodRun> runs;
  for (const std::string& spec : inputs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("curves inputs are <method>=<history.csv>");
    const auto method = parse_method(spec.substr(0, eq));
    if (!method) throw std::invalid_argument("unknown method in '" + spec + "'");
    const CsvTable t = read_csv(fs::path(spec.substr(eq + 1)));
    MethodRun run;
    run.method = *method;
    const std::size_t gen = t.column("generation"), best = t.column("best");
    for (const auto& row : t.rows) {
      GenerationStats g;
      g.generation = std::stoull(row[gen]);
      g.best = parse_number(row[best]);
      run.history.push_back(g);
    }
    runs.push_back(std::move(run));
  }
  if (out.empty() || out == "-") {
    emit_training_curves(std::cout, runs);
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    emit_training_curves(f, runs);
  }
  return 0;
}

int cmd_report(const std::string& dir) {
  const fs::path d(dir);
  std::ifstream summary(d / "summary.csv");
  if (!summary) throw std::invalid_argument("no summary.csv in " + dir);
  print_summary(std::cout, read_summary_csv(summary));
  if (std::ifstream comps(d / "comparisons.csv"); comps) {
    const CsvTable t = read_csv(comps);
    if (!t.rows.empty()) std::cout << "\nsign tests (alpha 0.05)\n";
    for (const auto& row : t.rows) {
      std::cout << "  " << row[0] << " vs " << row[1] << " [" << row[2] << "] wins " << row[3]
                << " losses " << row[4] << " ties " << row[5] << " p " << row[6]
                << (row[7] == "1" ? " *" : "") << '\n';
    }
  }
  if (std::ifstream tokens(d / "tokens.csv"); tokens) {
    const CsvTable t = read_csv(tokens);
    if (!t.rows.empty()) std::cout << "\nmean token count of final heuristics\n";
    for (const auto& row : t.rows) {
      std::cout << "  " << std::left << std::setw(24) << row[0] << row[2] << " (sd " << row[3]
                << ", " << row[1] << " runs)\n";
    }
  }
  return 0;
}

int cmd_simulate(const std::string& instance_file, const std::string& dispatcher,
                 std::uint64_t seed, const std::string& out) {
  const TerminalInstance inst = read_instance(fs::path(instance_file));
  std::unique_ptr<Dispatcher> owned;
  if (dispatcher == "manual") {
    owned = std::make_unique<ManualDispatcher>(ManualDispatcher::for_instance(inst));
  } else if (auto baselines = baseline_dispatchers(seed); baselines.count(dispatcher)) {
    owned = std::move(baselines.at(dispatcher));
  } else {
    const auto trees = read_heuristics(fs::path(dispatcher));
    if (trees.empty()) throw std::invalid_argument("heuristic file " + dispatcher + " is empty");
    owned = std::make_unique<ExprDispatcher>(trees.front());
  }
  const SimResult r = run_simulation(inst, *owned, inst.seed());
  const auto violations = validate_schedule(r, inst);
  if (out.empty() || out == "-") {
    write_result_csv(std::cout, r);
  } else {
    std::ofstream f(out);
    write_result_csv(f, r);
  }
  std::cerr << "TEU/h " << r.teu_per_hour << ", makespan " << r.makespan << " s, "
            << violations.size() << " violations\n";
  return violations.empty() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truck dispatching heuristics: GP, policy-gradient sequence models and their hybrid"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic terminal instance");
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--out", gen.out, "Output instance file (default stdout)");
  g->add_flag("--desk", gen.desk, "2 QCs, 4 YCs, 6 trucks, 100 tasks");
  g->add_option("--qcs", gen.qcs, "Quay cranes")->check(CLI::PositiveNumber);
  g->add_option("--ycs", gen.ycs, "Yard cranes")->check(CLI::PositiveNumber);
  g->add_option("--trucks", gen.trucks, "Trucks")->check(CLI::PositiveNumber);
  g->add_option("--tasks", gen.tasks, "Tasks")->check(CLI::PositiveNumber);
  g->add_option("--q", gen.q, "QC unload swap window")->check(CLI::PositiveNumber);

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run an experiment plan");
  r->add_option("--plan", run.plan, "Plan file (JSON)")->required()->check(CLI::ExistingFile);
  r->add_option("--out", run.out, "Output directory");
  r->add_flag("--desk", run.desk, "Apply desk-scale overrides");
  r->add_option("--method", run.methods, "Restrict to these methods");
  r->add_option("--seed", run.seed, "First repetition seed");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Single training run of one learned method");
  t->add_option("--instance", train.instances, "Training instance file(s)")->required()->check(CLI::ExistingFile);
  t->add_option("--method", train.method, "lgp, gprr, gprt, gprr_star, gprt_star, rnn_standalone, transformer_standalone");
  t->add_option("--seed", train.seed, "Run seed");
  t->add_option("--out", train.out, "Output directory");
  t->add_flag("--desk", train.desk, "Desk-scale population and generations");
  t->add_option("--threads", train.threads, "Fitness evaluation threads")->check(CLI::PositiveNumber);
  t->add_option("--lambda", train.lambda, "Weight of the shaped reward added to fitness");

  std::vector<std::string> curve_inputs;
  std::string curve_out;
  auto* c = app.add_subcommand("curves", "Merge history files into a long-format curve CSV");
  c->add_option("inputs", curve_inputs, "<method>=<history.csv> ...")->required();
  c->add_option("--out", curve_out, "Output CSV (default stdout)");

  std::string report_dir;
  auto* rep = app.add_subcommand("report", "Print the tables of a finished experiment");
  rep->add_option("--out", report_dir, "Experiment output directory")->required()->check(CLI::ExistingDirectory);

  std::string sim_instance, sim_dispatcher = "manual", sim_out;
  std::uint64_t sim_seed = 0;
  auto* s = app.add_subcommand("simulate", "Simulate one dispatcher and write the result CSV");
  s->add_option("--instance", sim_instance, "Instance file")->required()->check(CLI::ExistingFile);
  s->add_option("--method", sim_dispatcher, "manual, random, fifo, stt, mtr or a heuristic file");
  s->add_option("--seed", sim_seed, "Seed of the random baseline");
  s->add_option("--out", sim_out, "Result CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*g) return cmd_gen(gen);
    if (*r) return cmd_run(run);
    if (*t) return cmd_train(train);
    if (*c) return cmd_curves(curve_inputs, curve_out);
    if (*rep) return cmd_report(report_dir);
    if (*s) return cmd_simulate(sim_instance, sim_dispatcher, sim_seed, sim_out);
  } catch (const std::exception& e) {
    std::cerr << "gprt: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
