#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "fixtures.hpp"
#include "gprt/dispatchers.hpp"
#include "gprt/expr_tree.hpp"
#include "gprt/gp.hpp"
#include "gprt/heuristic_io.hpp"
#include "gprt/instance_gen.hpp"
#include "gprt/simulation.hpp"

using namespace gprt;
using namespace gprt::testing;

namespace {

FeatureVector abc(double a, double b, double c) {
  FeatureVector fv;
  fv[Feature::travel_time] = a;
  fv[Feature::qc_bound_trucks] = b;
  fv[Feature::qc_remaining_tasks] = c;
  return fv;
}

const char* kBranching = "if_else >= travel_time 5 * qc_bound_trucks qc_remaining_tasks 2";

FeatureVector random_features(Rng& rng) {
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::bernoulli_distribution zero(0.2);
  FeatureVector fv;
  for (std::size_t i = 0; i < kFeatureCount; ++i) fv.at(i) = zero(rng) ? 0.0 : u(rng);
  return fv;
}

class Scaled : public Dispatcher {
 public:
  Scaled(const Dispatcher& inner, double factor) : inner_(&inner), factor_(factor) {}
  double score(const DecisionPoint& p, const Candidate& c) const override {
    return factor_ * inner_->score(p, c);
  }

 private:
  const Dispatcher* inner_;
  double factor_;
};

std::vector<TaskId> chosen(const SimResult& r) {
  std::vector<TaskId> out;
  for (const DecisionRecord& d : r.decisions) out.push_back(d.chosen);
  return out;
}

}  // namespace

TEST_CASE("operator table") {
  const std::vector<int> arities = {2, 2, 2, 2, 2, 2, 3, 2, 2, 2, 2};
  REQUIRE(operator_tokens().size() == kOperatorCount);
  for (std::size_t i = 0; i < kOperatorCount; ++i) CHECK(operator_tokens()[i].arity() == arities[i]);
  CHECK(terminal_tokens().size() == kFeatureCount + kConstantPool.size());
  CHECK(all_tokens().size() == 30);
  for (const Token& t : all_tokens()) {
    const auto parsed = Token::parse(t.symbol());
    REQUIRE(parsed);
    CHECK(*parsed == t);
  }
  CHECK(*Token::parse("f1") == Token::feature(Feature::travel_time));
  CHECK(*Token::parse("f14") == Token::feature(Feature::elapsed_time));
  CHECK_FALSE(Token::parse("f15"));
  CHECK_FALSE(Token::parse("3"));
}

TEST_CASE("expression evaluation examples") {
  const ExprTree branching = parse(kBranching);
  CHECK(eval_expr(branching, abc(6, 3, 4)) == 12.0);
  CHECK(eval_expr(branching, abc(4, 3, 4)) == 2.0);
  CHECK(eval_expr(parse("/ 5 0.5"), {}) == 10.0);
  CHECK(eval_expr(from_polish(TokenSeq{Token::op(Op::div), Token::constant(3), Token::feature(Feature::task_size)}), {}) == 1.0);
  CHECK(apply_op(Op::div, 5.0, 0.0) == 1.0);
  CHECK(apply_op(Op::div, 0.0, 0.0) == 1.0);
  CHECK(apply_op(Op::if_else, 0.0, 7.0, 9.0) == 9.0);
  CHECK(apply_op(Op::if_else, -2.0, 7.0, 9.0) == 7.0);
  CHECK(apply_op(Op::logical_and, 3.0, -1.0) == 1.0);
  CHECK(apply_op(Op::logical_or, 0.0, 0.0) == 0.0);
  CHECK(apply_op(Op::max, 3.0, -1.0) == 3.0);
  CHECK(apply_op(Op::min, 3.0, -1.0) == -1.0);
  CHECK(apply_op(Op::ge, 2.0, 2.0) == 1.0);
  CHECK(apply_op(Op::le, 3.0, 2.0) == 0.0);
}

TEST_CASE("compiled and tree evaluation agree") {
  Rng rng(5);
  for (int k = 0; k < 500; ++k) {
    const ExprTree tree = random_tree(rng, 1 + k % 7, k % 2 == 0);
    const CompiledExpr compiled(tree);
    const FeatureVector fv = random_features(rng);
    const double a = eval_expr(tree, fv);
    const double b = compiled.evaluate(fv);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  }
}

TEST_CASE("evaluation is total and boolean operators are closed") {
  Rng rng(17);
  const std::vector<Op> booleans = {Op::ge, Op::le, Op::logical_and, Op::logical_or};
  std::uniform_real_distribution<double> wide(-1e308, 1e308);
  for (int k = 0; k < 2000; ++k) {
    const ExprTree tree = random_tree(rng, 1 + k % 8, k % 3 == 0);
    CHECK(std::isfinite(eval_expr(tree, random_features(rng))));
    const double a = wide(rng), b = k % 5 == 0 ? 0.0 : wide(rng);
    for (Op op : booleans) {
      const double v = apply_op(op, a, b);
      CHECK((v == 0.0 || v == 1.0));
    }
    CHECK(std::isfinite(apply_op(Op::mul, a, b)));
    CHECK(std::isfinite(apply_op(Op::div, a, 1e-300)));
    CHECK(std::isfinite(apply_op(Op::add, a, a)));
  }
}

TEST_CASE("Polish notation") {
  const ExprTree branching = parse(kBranching);
  CHECK(to_polish(branching).size() == 8);
  CHECK(branching.token_count() == 8);
  CHECK(branching.depth() == 2);
  CHECK(format_tokens(to_polish(branching)) == kBranching);

  const ExprTree leaf = parse("travel_time");
  CHECK(leaf == ExprTree::leaf(Token::feature(Feature::travel_time)));
  CHECK(leaf.depth() == 0);
  CHECK(to_polish(leaf) == TokenSeq{Token::feature(Feature::travel_time)});

  try {
    parse("+ travel_time");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.index() == 2);
  }
  CHECK_THROWS_AS(parse("travel_time 5"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse_tokens("+ bogus 1"), ParseError);
}

TEST_CASE("validate_prefix") {
  CHECK(validate_prefix(parse_tokens("* qc_bound_trucks qc_remaining_tasks")));
  CHECK_FALSE(validate_prefix(parse_tokens("* qc_bound_trucks qc_remaining_tasks 2")));
  CHECK_FALSE(validate_prefix(parse_tokens("* qc_bound_trucks")));
  CHECK_FALSE(validate_prefix(TokenSeq{}));
  Rng rng(3);
  for (int k = 0; k < 1000; ++k) CHECK(validate_prefix(to_polish(random_tree(rng, k % 9, k % 2))));
}

TEST_CASE("random trees round-trip through Polish notation") {
  Rng rng(99);
  for (int k = 0; k < 10000; ++k) {
    const ExprTree tree = random_tree(rng, k % 10, k % 2 == 0);
    REQUIRE(from_polish(to_polish(tree)) == tree);
  }
}

TEST_CASE("heuristic files") {
  const std::vector<ExprTree> trees = {parse(kBranching), parse("f1"), parse("max 0.5 f12")};
  std::stringstream io;
  write_heuristics(io, trees, "best of run\nseed 3");
  const std::string text = io.str();
  CHECK(text.rfind("# best of run\n# seed 3\n", 0) == 0);
  CHECK(read_heuristics(io) == trees);

  std::istringstream bad("f1\n\n# note\n+ f1\n");
  try {
    read_heuristics(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("manual heuristic branches") {
  FeatureVector fv;
  fv[Feature::travel_time] = 100.0;
  fv[Feature::qc_bound_trucks] = 2.0;
  CHECK(manual_heuristic({4.0, 3.0, 6.0}, fv) == -100.0);
  fv[Feature::qc_bound_trucks] = 5.0;
  CHECK(manual_heuristic({4.0, 3.0, 6.0}, fv) == 400.0);
  fv[Feature::qc_bound_trucks] = 6.0;
  CHECK(manual_heuristic({4.0, 3.0, 6.0}, fv) == 200400.0);

  const ManualDispatcher m({4.0, 3.0, 6.0});
  Candidate c{0, 1, fv};
  CHECK(m.score({}, c) == -200400.0);

  const TerminalInstance inst = generate_instance(small_config(2, 4, 6, 10), 1);
  const ManualDispatcher tuned = ManualDispatcher::for_instance(inst);
  CHECK(tuned.params_for(1).desired_trucks == 3.0);
  CHECK(tuned.params_for(1).priority == 1.0);
  CHECK(tuned.params_for(1).truck_limit == 6.0);
}

TEST_CASE("baseline dispatchers") {
  const auto all = baseline_dispatchers(7);
  CHECK(all.size() == 4);
  for (const char* name : {"random", "fifo", "stt", "mtr"}) CHECK(all.count(name) == 1);

  SUBCASE("stt prefers the shortest trip") {
    std::vector<double> scores;
    const std::vector<TaskId> ids = {0, 1, 2};
    for (double t : {50.0, 120.0, 80.0}) {
      FeatureVector fv;
      fv[Feature::travel_time] = t;
      scores.push_back(SttDispatcher{}.score({}, Candidate{scores.size(), 1, fv}));
    }
    CHECK(rank_candidates(scores, ids)[0] == 1);
  }

  SUBCASE("fifo prefers the smallest id") {
    std::vector<double> scores;
    const std::vector<TaskId> ids = {7, 2, 9};
    for (TaskId id : ids) scores.push_back(FifoDispatcher{}.score({}, Candidate{id, 1, {}}));
    CHECK(rank_candidates(scores, ids) == std::vector<std::size_t>{2, 1, 3});
  }

  SUBCASE("random is reproducible") {
    const TerminalInstance inst = generate_instance(small_config(2, 3, 3, 30), 4);
    const SimResult a = run_simulation(inst, RandomDispatcher(12), 0, SimOptions{true});
    const SimResult b = run_simulation(inst, RandomDispatcher(12), 0, SimOptions{true});
    CHECK(chosen(a) == chosen(b));
    const SimResult c = run_simulation(inst, RandomDispatcher(13), 0, SimOptions{true});
    CHECK(chosen(a) != chosen(c));
  }
}

TEST_CASE("rank_candidates") {
  const std::vector<TaskId> ids = {0, 1, 2};
  CHECK(rank_candidates(std::vector<double>{3.0, 1.0, 2.0}, ids) ==
        std::vector<std::size_t>{1, 3, 2});
  CHECK(rank_candidates(std::vector<double>{1.0, 1.0, 1.0}, std::vector<TaskId>{5, 3, 4}) ==
        std::vector<std::size_t>{3, 1, 2});
}

TEST_CASE("positive rescaling leaves every dispatch decision unchanged") {
  const TerminalInstance inst = generate_instance(small_config(2, 4, 5, 40), 8);
  const ManualDispatcher manual = ManualDispatcher::for_instance(inst);
  const ExprDispatcher branching(parse(kBranching));
  auto baselines = baseline_dispatchers(2);
  std::vector<const Dispatcher*> dispatchers = {&manual, &branching};
  for (const auto& [name, d] : baselines) dispatchers.push_back(d.get());
  for (const Dispatcher* d : dispatchers) {
    const auto reference = chosen(run_simulation(inst, *d, 1, SimOptions{true}));
    for (double factor : {0.25, 3.0, 1000.0}) {
      CHECK(chosen(run_simulation(inst, Scaled(*d, factor), 1, SimOptions{true})) == reference);
    }
  }
}
