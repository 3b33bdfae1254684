#ifndef GPRT_TESTS_FIXTURES_HPP_
#define GPRT_TESTS_FIXTURES_HPP_

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "gprt/expr_tree.hpp"
#include "gprt/gp.hpp"
#include "gprt/heuristic_io.hpp"
#include "gprt/instance.hpp"
#include "gprt/instance_gen.hpp"

namespace gprt::testing {

// Every off-diagonal entry set to `fallback`.
inline TravelMatrix travel_matrix(std::size_t nodes, double fallback) {
  TravelMatrix m(nodes, fallback);
  for (std::size_t i = 0; i < nodes; ++i) m(i, i) = 0.0;
  return m;
}

inline TaskSpec unload(TaskId id, NodeId qc, NodeId yc, double d, double h, int size = 1) {
  return TaskSpec{id, qc, yc, TaskType::unload, size, d, h};
}

inline TaskSpec load(TaskId id, NodeId yc, NodeId qc, double d, double h, int size = 1) {
  return TaskSpec{id, yc, qc, TaskType::load, size, d, h};
}

// Every task has a crane pair of its own, so no crane is ever shared.
inline TerminalInstance contention_free(std::uint64_t seed, std::size_t max_tasks = 6,
                                        std::size_t max_trucks = 3) {
  std::mt19937_64 rng(seed);
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_tasks)(rng);
  const std::size_t trucks = std::uniform_int_distribution<std::size_t>(1, max_trucks)(rng);
  const std::size_t nodes = 1 + 2 * n;
  TravelMatrix travel(nodes);
  std::uniform_real_distribution<double> t(5.0, 200.0), op(10.0, 180.0);
  for (std::size_t a = 0; a < nodes; ++a) {
    for (std::size_t b = 0; b < nodes; ++b) travel(a, b) = a == b ? 0.0 : t(rng);
  }
  std::vector<TaskSpec> tasks;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId qc = 1 + i;
    const NodeId yc = 1 + n + i;
    tasks.push_back(coin(rng) ? unload(i, qc, yc, op(rng), op(rng), coin(rng) ? 2 : 1)
                              : load(i, yc, qc, op(rng), op(rng), coin(rng) ? 2 : 1));
  }
  std::vector<bool> remote(n);
  for (std::size_t i = 0; i < n; ++i) remote[i] = coin(rng);
  return TerminalInstance(n, n, remote, travel, trucks, tasks, 3, seed);
}

inline GeneratorConfig small_config(std::size_t qcs, std::size_t ycs, std::size_t trucks,
                                    std::size_t tasks) {
  GeneratorConfig c;
  c.quay_cranes = qcs;
  c.yard_cranes = ycs;
  c.trucks = trucks;
  c.tasks = tasks;
  return c;
}

inline std::shared_ptr<const TerminalInstance> shared(TerminalInstance inst) {
  return std::make_shared<const TerminalInstance>(std::move(inst));
}

inline ExprTree parse(const char* text) { return from_polish(parse_tokens(text)); }

}  // namespace gprt::testing

#endif  // GPRT_TESTS_FIXTURES_HPP_
