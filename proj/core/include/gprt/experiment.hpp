#ifndef GPRT_EXPERIMENT_HPP_
#define GPRT_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gprt/gp.hpp"
#include "gprt/hybrid.hpp"
#include "gprt/instance.hpp"
#include "gprt/stats.hpp"

namespace gprt {

enum class Method {
  manual,
  random,
  fifo,
  stt,
  mtr,
  lgp,
  gprr,
  gprt,
  gprr_star,
  gprt_star,
  rnn_standalone,
  transformer_standalone
};

std::string_view method_name(Method method);
std::optional<Method> parse_method(std::string_view name);
const std::vector<Method>& all_methods();
bool is_learned(Method method);  // produces an evolved or sampled heuristic
bool is_hybrid(Method method);

struct DeskOverrides {
  std::size_t population = 64;
  std::size_t cycle_generations = 5;
  std::size_t seeded = 32;
  std::size_t generations = 30;
  std::size_t quay_cranes = 2;
  std::size_t yard_cranes = 4;
  std::size_t trucks = 6;
  std::size_t tasks = 100;
};

struct ExperimentPlan {
  std::vector<Method> methods;
  std::vector<std::string> train;  // instance files
  std::vector<std::string> test;
  std::size_t repetitions = 5;
  std::vector<std::uint64_t> seeds;  // empty: 1..repetitions
  bool desk = true;
  DeskOverrides overrides;
  unsigned threads = 1;
  // LGP stops at the last generation within the largest hybrid budget of
  // the same repetition; standalone searches get LGP's evaluation count.
  bool budget_matched = true;
  std::vector<std::pair<Method, Method>> comparisons;  // empty: defaults

  // Throws std::invalid_argument on an empty method list, repetitions < 1,
  // overlapping train/test sets or a seed count that disagrees.
  void validate() const;
  std::vector<std::uint64_t> run_seeds() const;
  std::vector<std::pair<Method, Method>> effective_comparisons() const;
  GpConfig gp_config() const;
  HybridConfig hybrid_config(Method method, std::uint64_t seed) const;
};

ExperimentPlan read_plan(std::istream& in);  // JSON; throws std::invalid_argument
ExperimentPlan read_plan(const std::filesystem::path& path);
void write_plan(std::ostream& out, const ExperimentPlan& plan);

struct NamedInstance {
  std::string name;
  std::shared_ptr<const TerminalInstance> instance;
};

struct Cell {
  std::string block;  // "train" or "test"
  std::string set;
  Method method = Method::manual;
  std::uint64_t seed = 0;
  double teu_per_hour = 0.0;
};

struct SummaryRow {
  std::string block;
  std::string set;  // instance name, or "avg" over the block's sets
  Method method = Method::manual;
  double mean_teu_per_hour = 0.0;
  std::optional<double> improvement_pct;  // vs manual, when manual is planned
};

struct ComparisonRow {
  Method a = Method::manual;
  Method b = Method::manual;
  std::string block;
  SignTest test;
};

struct MethodRun {
  Method method = Method::manual;
  std::uint64_t seed = 0;
  Individual best{ExprTree::leaf(Token::constant(0)), std::nullopt, Origin::random};
  std::vector<GenerationStats> history;
  std::size_t evaluations = 0;
};

struct ExperimentResult {
  std::vector<Cell> cells;
  std::vector<SummaryRow> summary;
  std::vector<ComparisonRow> comparisons;
  std::vector<MethodRun> runs;  // learned methods only
  std::vector<TokenCountSummary> token_counts;
};

using ProgressLog = std::function<void(const std::string&)>;

ExperimentResult run_experiment(const ExperimentPlan& plan, const std::vector<NamedInstance>& train,
                                const std::vector<NamedInstance>& test, const ProgressLog& log = {});

// Loads the plan's instance files, runs it and writes cells.csv,
// summary.csv, comparisons.csv, curves.csv, tokens.csv, best.txt and
// manifest.json into `out_dir`.
ExperimentResult run_plan_files(const ExperimentPlan& plan, const std::filesystem::path& out_dir,
                                const ProgressLog& log = {});

// Budget-matched LGP: evolves one generation at a time and returns the best of
// the last generation whose cumulative evaluations stay within `budget`, or
// all of `config.generations` when budget is 0.
MethodRun run_lgp(const GpConfig& config, FitnessEvaluator& evaluator, std::uint64_t seed,
                  std::size_t budget = 0, std::size_t max_generations = 0);

double improvement_pct(double method, double manual);
// best[last] - best[at two thirds of the run].
double last_third_improvement(const std::vector<GenerationStats>& history);

void write_cells_csv(std::ostream& out, const std::vector<Cell>& cells);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_comparisons_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);
// method,seed,generation,best_fitness
void emit_training_curves(std::ostream& out, const std::vector<MethodRun>& runs);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

}  // namespace gprt

#endif  // GPRT_EXPERIMENT_HPP_
