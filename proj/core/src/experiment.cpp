#include "gprt/experiment.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <json.hpp>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gprt/csv.hpp"
#include "gprt/dispatchers.hpp"
#include "gprt/heuristic_io.hpp"
#include "gprt/instance_io.hpp"
#include "gprt/policy.hpp"
#include "gprt/training.hpp"

namespace gprt {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 12> kMethodNames = {
    "manual", "random",    "fifo",      "stt",           "mtr",
    "lgp",    "gprr",      "gprt",      "gprr_star",     "gprt_star",
    "rnn_standalone", "transformer_standalone"};

Method method_from_json(const json& j) {
  const auto m = parse_method(j.get<std::string>());
  if (!m) throw std::invalid_argument("unknown method '" + j.get<std::string>() + "'");
  return *m;
}

bool planned(const ExperimentPlan& plan, Method m) {
  return std::find(plan.methods.begin(), plan.methods.end(), m) != plan.methods.end();
}

std::vector<std::shared_ptr<const TerminalInstance>> instances_of(const std::vector<NamedInstance>& v) {
  std::vector<std::shared_ptr<const TerminalInstance>> out;
  for (const NamedInstance& n : v) out.push_back(n.instance);
  return out;
}

std::vector<GenerationStats> hybrid_history(const HybridResult& r) {
  std::vector<GenerationStats> h;
  for (const HybridGeneration& g : r.history) {
    GenerationStats s = g.stats;
    s.best = g.best_so_far;
    h.push_back(s);
  }
  return h;
}

}  // namespace

std::string_view method_name(Method method) { return kMethodNames[static_cast<std::size_t>(method)]; }

std::optional<Method> parse_method(std::string_view name) {
  for (std::size_t i = 0; i < kMethodNames.size(); ++i) {
    if (kMethodNames[i] == name) return static_cast<Method>(i);
  }
  return std::nullopt;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> v = [] {
    std::vector<Method> m;
    for (std::size_t i = 0; i < kMethodNames.size(); ++i) m.push_back(static_cast<Method>(i));
    return m;
  }();
  return v;
}

bool is_hybrid(Method m) {
  return m == Method::gprr || m == Method::gprt || m == Method::gprr_star || m == Method::gprt_star;
}

bool is_learned(Method m) {
  return m == Method::lgp || is_hybrid(m) || m == Method::rnn_standalone ||
         m == Method::transformer_standalone;
}

void ExperimentPlan::validate() const {
  if (methods.empty()) throw std::invalid_argument("plan lists no methods");
  if (std::set<Method>(methods.begin(), methods.end()).size() != methods.size()) {
    throw std::invalid_argument("plan lists a method twice");
  }
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (!seeds.empty() && seeds.size() != repetitions) {
    throw std::invalid_argument("seed count must equal repetitions");
  }
  if (train.empty()) throw std::invalid_argument("plan needs at least one training instance");
  for (const std::string& t : train) {
    if (std::find(test.begin(), test.end(), t) != test.end()) {
      throw std::invalid_argument("instance '" + t + "' is in both train and test sets");
    }
  }
  for (const auto& [a, b] : comparisons) {
    if (!planned(*this, a) || !planned(*this, b)) {
      throw std::invalid_argument("comparison names a method that is not planned");
    }
  }
  if (desk) {
    hybrid_config(Method::gprt, 0).validate();
  }
}

std::vector<std::uint64_t> ExperimentPlan::run_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> s;
  for (std::size_t i = 1; i <= repetitions; ++i) s.push_back(i);
  return s;
}

std::vector<std::pair<Method, Method>> ExperimentPlan::effective_comparisons() const {
  if (!comparisons.empty()) return comparisons;
  const std::vector<std::pair<Method, Method>> defaults = {
      {Method::gprt, Method::lgp},       {Method::gprr, Method::lgp},
      {Method::gprt, Method::gprt_star}, {Method::gprr, Method::gprr_star},
      {Method::lgp, Method::manual}};
  std::vector<std::pair<Method, Method>> out;
  for (const auto& p : defaults) {
    if (planned(*this, p.first) && planned(*this, p.second)) out.push_back(p);
  }
  return out;
}

GpConfig ExperimentPlan::gp_config() const {
  GpConfig c = desk ? GpConfig::desk() : GpConfig{};
  if (desk) {
    c.population_size = overrides.population;
    c.generations = overrides.generations;
  }
  return c;
}

HybridConfig ExperimentPlan::hybrid_config(Method method, std::uint64_t seed) const {
  const bool lstm = method == Method::gprr || method == Method::gprr_star;
  HybridConfig c = desk ? HybridConfig::desk(PolicyKind::lstm) : HybridConfig{};
  c.policy_kind = lstm ? PolicyKind::lstm : PolicyKind::transformer;
  if (desk) {
    c.population_size = overrides.population;
    c.cycle_generations = overrides.cycle_generations;
    c.seeded = overrides.seeded;
    c.total_generations = overrides.generations;
  }
  c.gp = gp_config();
  c.seeding_enabled = method == Method::gprr || method == Method::gprt;
  c.seed = seed;
  return c;
}

ExperimentPlan read_plan(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("plan is not valid JSON: ") + e.what());
  }
  ExperimentPlan p;
  try {
    for (const json& m : doc.at("methods")) p.methods.push_back(method_from_json(m));
    p.train = doc.at("train").get<std::vector<std::string>>();
    p.test = doc.value("test", std::vector<std::string>{});
    p.repetitions = doc.value("repetitions", p.repetitions);
    p.seeds = doc.value("seeds", std::vector<std::uint64_t>{});
    p.desk = doc.value("desk", p.desk);
    p.threads = doc.value("threads", p.threads);
    p.budget_matched = doc.value("budget_matched", p.budget_matched);
    if (doc.contains("overrides")) {
      const json& o = doc["overrides"];
      DeskOverrides& d = p.overrides;
      d.population = o.value("population", d.population);
      d.cycle_generations = o.value("cycle_generations", d.cycle_generations);
      d.seeded = o.value("seeded", d.seeded);
      d.generations = o.value("generations", d.generations);
      d.quay_cranes = o.value("quay_cranes", d.quay_cranes);
      d.yard_cranes = o.value("yard_cranes", d.yard_cranes);
      d.trucks = o.value("trucks", d.trucks);
      d.tasks = o.value("tasks", d.tasks);
    }
    if (doc.contains("comparisons")) {
      for (const json& c : doc["comparisons"]) {
        if (c.size() != 2) throw std::invalid_argument("a comparison pairs exactly two methods");
        p.comparisons.emplace_back(method_from_json(c[0]), method_from_json(c[1]));
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed plan: ") + e.what());
  }
  p.validate();
  return p;
}

ExperimentPlan read_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open plan file " + path.string());
  ExperimentPlan p = read_plan(in);
  const std::filesystem::path base = path.parent_path();
  auto resolve = [&](std::string& f) {
    if (std::filesystem::path(f).is_relative()) f = (base / f).lexically_normal().string();
  };
  for (std::string& f : p.train) resolve(f);
  for (std::string& f : p.test) resolve(f);
  return p;
}

void write_plan(std::ostream& out, const ExperimentPlan& p) {
  json doc;
  json methods = json::array();
  for (Method m : p.methods) methods.push_back(std::string(method_name(m)));
  doc["methods"] = methods;
  doc["train"] = p.train;
  doc["test"] = p.test;
  doc["repetitions"] = p.repetitions;
  doc["seeds"] = p.run_seeds();
  doc["desk"] = p.desk;
  doc["threads"] = p.threads;
  doc["budget_matched"] = p.budget_matched;
  const DeskOverrides& d = p.overrides;
  doc["overrides"] = {{"population", d.population}, {"cycle_generations", d.cycle_generations},
                      {"seeded", d.seeded},         {"generations", d.generations},
                      {"quay_cranes", d.quay_cranes}, {"yard_cranes", d.yard_cranes},
                      {"trucks", d.trucks},         {"tasks", d.tasks}};
  json comps = json::array();
  for (const auto& [a, b] : p.comparisons) {
    comps.push_back({std::string(method_name(a)), std::string(method_name(b))});
  }
  doc["comparisons"] = comps;
  out << doc.dump(2) << '\n';
}

MethodRun run_lgp(const GpConfig& config, FitnessEvaluator& evaluator, std::uint64_t seed,
                  std::size_t budget, std::size_t max_generations) {
  MethodRun run;
  run.method = Method::lgp;
  run.seed = seed;
  const std::size_t start = evaluator.evaluations();
  GpRun gp(config, evaluator, seed);
  gp.initialize();
  if (budget == 0) {
    gp.evolve(config.generations);
    run.best = gp.best();
    run.history = gp.history();
    run.evaluations = evaluator.evaluations() - start;
    return run;
  }
  const std::size_t cap = max_generations ? max_generations : 4 * config.generations;
  run.best = gp.best();
  run.history.push_back(gp.history().back());
  run.evaluations = evaluator.evaluations() - start;
  while (gp.generation() < cap) {
    gp.evolve(1);
    const std::size_t used = evaluator.evaluations() - start;
    if (used > budget) break;
    run.best = gp.best();
    run.history.push_back(gp.history().back());
    run.evaluations = used;
  }
  return run;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, const std::vector<NamedInstance>& train,
                                const std::vector<NamedInstance>& test, const ProgressLog& log) {
  plan.validate();
  if (train.empty()) throw std::invalid_argument("no training instances");
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  ExperimentResult out;
  const auto train_set = instances_of(train);

  for (std::uint64_t seed : plan.run_seeds()) {
    std::map<Method, MethodRun> learned;
    std::size_t hybrid_budget = 0;
    for (Method m : plan.methods) {
      if (!is_hybrid(m)) continue;
      say(std::string(method_name(m)) + " seed " + std::to_string(seed));
      FitnessEvaluator ev(train_set, plan.threads);
      const HybridResult r = run_hybrid(plan.hybrid_config(m, seed), ev);
      MethodRun run{m, seed, r.best, hybrid_history(r), r.evaluations};
      hybrid_budget = std::max(hybrid_budget, r.evaluations);
      learned.emplace(m, std::move(run));
    }
    std::size_t lgp_budget = 0;
    if (planned(plan, Method::lgp)) {
      say("lgp seed " + std::to_string(seed));
      FitnessEvaluator ev(train_set, plan.threads);
      MethodRun run = run_lgp(plan.gp_config(), ev, seed, plan.budget_matched ? hybrid_budget : 0);
      lgp_budget = run.evaluations;
      learned.emplace(Method::lgp, std::move(run));
    }
    const GpConfig gp = plan.gp_config();
    std::size_t standalone_budget = lgp_budget ? lgp_budget : hybrid_budget;
    if (standalone_budget == 0) standalone_budget = gp.population_size * (gp.generations + 1);
    for (Method m : {Method::rnn_standalone, Method::transformer_standalone}) {
      if (!planned(plan, m)) continue;
      say(std::string(method_name(m)) + " seed " + std::to_string(seed));
      PolicyConfig pc;
      pc.kind = m == Method::rnn_standalone ? PolicyKind::lstm : PolicyKind::transformer;
      pc.seed = seed;
      auto policy = make_policy(pc);
      TrainState state;
      FitnessEvaluator ev(train_set, plan.threads);
      StandaloneConfig sc;
      sc.budget = standalone_budget;
      sc.seed = seed;
      const StandaloneResult r = standalone_search(*policy, state, ev, sc);
      learned.emplace(m, MethodRun{m, seed, r.best, r.history, ev.evaluations()});
    }

    const auto baselines = baseline_dispatchers(seed);
    auto evaluate = [&](Method m, const TerminalInstance& inst) {
      switch (m) {
        case Method::manual:
          return run_simulation(inst, ManualDispatcher::for_instance(inst), inst.seed()).teu_per_hour;
        case Method::random:
        case Method::fifo:
        case Method::stt:
        case Method::mtr:
          return run_simulation(inst, *baselines.at(std::string(method_name(m))), inst.seed()).teu_per_hour;
        default:
          return run_simulation(inst, ExprDispatcher(learned.at(m).best.tree), inst.seed()).teu_per_hour;
      }
    };
    for (Method m : plan.methods) {
      for (const NamedInstance& n : train) out.cells.push_back({"train", n.name, m, seed, evaluate(m, *n.instance)});
      for (const NamedInstance& n : test) out.cells.push_back({"test", n.name, m, seed, evaluate(m, *n.instance)});
    }
    for (Method m : plan.methods) {
      if (learned.count(m)) out.runs.push_back(std::move(learned.at(m)));
    }
  }

  // Means over repetitions per (block, set, method), then block averages.
  const bool has_manual = planned(plan, Method::manual);
  for (const std::string block : {"train", "test"}) {
    const auto& sets = block == "train" ? train : test;
    if (sets.empty()) continue;
    std::map<Method, std::vector<double>> set_means;
    std::vector<SummaryRow> rows;
    for (const NamedInstance& n : sets) {
      for (Method m : plan.methods) {
        std::vector<double> v;
        for (const Cell& c : out.cells) {
          if (c.block == block && c.set == n.name && c.method == m) v.push_back(c.teu_per_hour);
        }
        const double avg = mean(v);
        set_means[m].push_back(avg);
        rows.push_back(SummaryRow{block, n.name, m, avg, std::nullopt});
      }
    }
    for (Method m : plan.methods) rows.push_back(SummaryRow{block, "avg", m, mean(set_means[m]), std::nullopt});
    if (has_manual) {
      for (SummaryRow& r : rows) {
        for (const SummaryRow& ref : rows) {
          if (ref.set == r.set && ref.method == Method::manual) {
            r.improvement_pct = improvement_pct(r.mean_teu_per_hour, ref.mean_teu_per_hour);
          }
        }
      }
    }
    out.summary.insert(out.summary.end(), rows.begin(), rows.end());
    for (const auto& [a, b] : plan.effective_comparisons()) {
      out.comparisons.push_back(ComparisonRow{a, b, block, sign_test(set_means[a], set_means[b])});
    }
  }

  for (Method m : plan.methods) {
    if (!is_learned(m)) continue;
    std::vector<Individual> bests;
    for (const MethodRun& r : out.runs) {
      if (r.method == m) bests.push_back(r.best);
    }
    out.token_counts.push_back(report_token_counts(std::string(method_name(m)), bests));
  }
  return out;
}

ExperimentResult run_plan_files(const ExperimentPlan& plan, const std::filesystem::path& out_dir,
                                const ProgressLog& log) {
  plan.validate();
  auto load = [](const std::vector<std::string>& files) {
    std::vector<NamedInstance> v;
    for (const std::string& f : files) {
      if (!std::filesystem::exists(f)) throw std::invalid_argument("instance file not found: " + f);
      v.push_back(NamedInstance{std::filesystem::path(f).stem().string(),
                                std::make_shared<const TerminalInstance>(read_instance(std::filesystem::path(f)))});
    }
    return v;
  };
  const auto train = load(plan.train);
  const auto test = load(plan.test);
  ExperimentResult r = run_experiment(plan, train, test, log);

  std::filesystem::create_directories(out_dir);
  auto open = [&](const char* name) {
    std::ofstream f(out_dir / name);
    if (!f) throw std::runtime_error("cannot write " + (out_dir / name).string());
    return f;
  };
  {
    auto f = open("cells.csv");
    write_cells_csv(f, r.cells);
  }
  {
    auto f = open("summary.csv");
    write_summary_csv(f, r.summary);
  }
  {
    auto f = open("comparisons.csv");
    write_comparisons_csv(f, r.comparisons);
  }
  {
    auto f = open("curves.csv");
    emit_training_curves(f, r.runs);
  }
  {
    auto f = open("tokens.csv");
    write_token_counts(f, r.token_counts);
  }
  {
    auto f = open("best.txt");
    for (const MethodRun& run : r.runs) {
      f << "# " << method_name(run.method) << " seed " << run.seed << " fitness "
        << run.best.fitness.value_or(kFailedFitness) << '\n';
      write_heuristics(f, {run.best.tree});
    }
  }
  {
    json manifest;
    std::ostringstream plan_text;
    write_plan(plan_text, plan);
    manifest["plan"] = json::parse(plan_text.str());
    json hashes = json::object();
    for (const auto& files : {plan.train, plan.test}) {
      for (const std::string& f : files) hashes[f] = file_hash(f);
    }
    manifest["instance_hashes"] = hashes;
    auto f = open("manifest.json");
    f << manifest.dump(2) << '\n';
  }
  return r;
}

double improvement_pct(double method, double manual) {
  if (manual == 0.0) throw std::invalid_argument("manual TEU/h is zero");
  return (method - manual) / manual * 100.0;
}

double last_third_improvement(const std::vector<GenerationStats>& history) {
  if (history.size() < 2) return 0.0;
  const std::size_t last = history.size() - 1;
  const std::size_t mark = (2 * last) / 3;
  return history[last].best - history[mark].best;
}

void write_cells_csv(std::ostream& out, const std::vector<Cell>& cells) {
  out << "block,set,method,seed,teu_per_hour\n";
  for (const Cell& c : cells) {
    out << c.block << ',' << c.set << ',' << method_name(c.method) << ',' << c.seed << ','
        << format_number(c.teu_per_hour) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "block,set,method,mean_teu_per_hour,improvement_pct\n";
  for (const SummaryRow& r : rows) {
    out << r.block << ',' << r.set << ',' << method_name(r.method) << ','
        << format_number(r.mean_teu_per_hour) << ','
        << (r.improvement_pct ? format_number(*r.improvement_pct) : "") << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  const std::size_t block = t.column("block"), set = t.column("set"), method = t.column("method"),
                    avg = t.column("mean_teu_per_hour"), imp = t.column("improvement_pct");
  std::vector<SummaryRow> rows;
  for (const auto& row : t.rows) {
    const auto m = parse_method(row[method]);
    if (!m) throw std::runtime_error("unknown method '" + row[method] + "' in summary");
    SummaryRow r{row[block], row[set], *m, parse_number(row[avg]), std::nullopt};
    if (!row[imp].empty()) r.improvement_pct = parse_number(row[imp]);
    rows.push_back(r);
  }
  return rows;
}

void write_comparisons_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "method_a,method_b,block,wins,losses,ties,p_value,significant\n";
  for (const ComparisonRow& r : rows) {
    out << method_name(r.a) << ',' << method_name(r.b) << ',' << r.block << ',' << r.test.wins << ','
        << r.test.losses << ',' << r.test.ties << ',' << format_number(r.test.p_value) << ','
        << (r.test.significant ? 1 : 0) << '\n';
  }
}

void emit_training_curves(std::ostream& out, const std::vector<MethodRun>& runs) {
  out << "method,seed,generation,best_fitness\n";
  for (const MethodRun& r : runs) {
    for (const GenerationStats& g : r.history) {
      out << method_name(r.method) << ',' << r.seed << ',' << g.generation << ','
          << format_number(g.best) << '\n';
    }
  }
}

}  // namespace gprt
