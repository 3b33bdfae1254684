#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>

#include "fixtures.hpp"
#include "gprt/brute_force.hpp"
#include "gprt/dispatchers.hpp"
#include "gprt/instance_gen.hpp"
#include "gprt/schedule.hpp"
#include "gprt/simulation.hpp"

using namespace gprt;
using namespace gprt::testing;

namespace {

// Depot 0, QCs 1-2, YCs 3-4.
TerminalInstance two_task_line() {
  TravelMatrix tau = travel_matrix(5, 100.0);
  tau(kDepot, 1) = 30.0;
  tau(1, 3) = 45.0;
  tau(3, 4) = 20.0;
  tau(4, 2) = 55.0;
  std::vector<TaskSpec> tasks = {unload(0, 1, 3, 60.0, 40.0), load(1, 4, 2, 50.0, 30.0)};
  return TerminalInstance(2, 2, {false, false}, tau, 1, tasks, 3, 1);
}

// Exhaustive search written against the stepping API only.
double enumerate_best(const Simulation& sim) {
  Simulation s = sim;
  if (!s.advance()) return s.result().teu_per_hour;
  double best = 0.0;
  for (const Candidate& c : s.candidates()) {
    Simulation next = s;
    next.choose(c.task);
    best = std::max(best, enumerate_best(next));
  }
  return best;
}

TaskRecord span_record(TaskId task, double start, double end) {
  TaskRecord r;
  r.task = task;
  r.start = start;
  r.end = end;
  return r;
}

}  // namespace

TEST_CASE("single truck timeline follows the travel and operation chain") {
  const TerminalInstance inst = two_task_line();
  for (const auto& [name, dispatcher] : baseline_dispatchers(3)) {
    if (name == "random") continue;
    CAPTURE(name);
    const SimResult r = run_simulation(inst, *dispatcher, 0);
    const TaskRecord* a = r.find(0);
    const TaskRecord* b = r.find(1);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->start == 30.0);
    CHECK(a->end == 30.0 + 60.0 + 45.0 + 40.0);
    CHECK(b->start == a->end + 20.0);
    CHECK(b->end == b->start + 50.0 + 55.0 + 30.0);
    CHECK(r.makespan == b->end - a->start);
  }
}

TEST_CASE("compute_times closed form") {
  const TerminalInstance inst = two_task_line();
  const TaskTimes t = compute_times(inst, TimingPlan{{{0, 1}}, {}});
  CHECK(t.start[0] == inst.travel(kDepot, 1));
  CHECK(t.start[1] == t.end[0] + inst.travel(3, 4));
  CHECK(t.end[0] == 175.0);
  CHECK(t.end[1] == 330.0);

  SUBCASE("crane-contended pair at one yard crane") {
    TravelMatrix tau = travel_matrix(4, 100.0);
    tau(kDepot, 1) = 10.0;
    tau(kDepot, 2) = 10.0;
    const TerminalInstance shared_yc(2, 1, {false, false}, tau, 2,
                                     {unload(0, 1, 3, 20.0, 50.0), unload(1, 2, 3, 20.0, 50.0)},
                                     3, 0);
    TimingPlan plan{{{0}, {1}}, {{}, {}, {}, {0, 1}}};
    const TaskTimes c = compute_times(shared_yc, plan);
    CHECK(c.start[0] == 10.0);
    CHECK(c.end[0] == 180.0);
    CHECK(c.start[1] == 10.0);
    // Released at 180: max(10, 180) + 20 + 100 + 50.
    CHECK(c.end[1] == 350.0);
  }

  SUBCASE("cyclic precedence") {
    // Task 1 after task 0 on the truck, but task 0 after task 1 at a crane.
    const TimingPlan bad{{{0, 1}}, {{}, {1, 0}, {}, {}, {}}};
    CHECK_THROWS_AS(compute_times(inst, bad), ScheduleError);
  }

  SUBCASE("tasks missing from every chain") {
    CHECK_THROWS_AS(compute_times(inst, TimingPlan{{{0}}, {}}), ScheduleError);
  }
}

TEST_CASE("engine matches compute_times on contention-free instances") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const TerminalInstance inst = contention_free(seed);
    for (const auto& [name, dispatcher] : baseline_dispatchers(seed)) {
      CAPTURE(seed);
      CAPTURE(name);
      const SimResult r = run_simulation(inst, *dispatcher, seed);
      const TaskTimes t = compute_times(inst, plan_from_result(inst, r));
      for (TaskId i = 0; i < inst.task_count(); ++i) {
        CHECK(r.find(i)->start == t.start[i]);
        CHECK(r.find(i)->end == t.end[i]);
      }
    }
  }
}

TEST_CASE("finished engine idles without logging decisions") {
  const TerminalInstance inst = generate_instance(small_config(1, 2, 2, 6), 5);
  Simulation sim(inst, 0, SimOptions{true});
  while (sim.advance()) sim.choose(sim.candidates().front().task);
  REQUIRE(sim.finished());
  const std::size_t logged = sim.result().decisions.size();
  CHECK_FALSE(sim.advance());
  CHECK_FALSE(sim.advance());
  CHECK(sim.result().decisions.size() == logged);
  CHECK(logged == inst.task_count());
}

TEST_CASE("brute force optimum is reproduced by replaying its sequence") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CAPTURE(seed);
    const TerminalInstance inst = generate_instance(small_config(2, 2, 2, 4), seed);
    const BruteForceResult bf = brute_force_optimum(inst, 0);
    CHECK(bf.best_teu_per_hour == enumerate_best(Simulation(inst, 0)));
    const SimResult replay = run_simulation(inst, SequenceDispatcher(bf.sequence), 0);
    CHECK(replay.teu_per_hour == bf.best_teu_per_hour);
    CHECK(compute_teu_per_hour(replay, inst.tasks()) == replay.teu_per_hour);
    for (const auto& [name, dispatcher] : baseline_dispatchers(seed)) {
      CHECK(run_simulation(inst, *dispatcher, 0).teu_per_hour <= bf.best_teu_per_hour);
    }
  }
}

TEST_CASE("adding a truck never lowers the brute-force optimum") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    CAPTURE(seed);
    auto config = small_config(2, 2, 1, 4);
    const TerminalInstance base = generate_instance(config, seed);
    const TerminalInstance more(base.quay_crane_count(), base.yard_crane_count(),
                                base.remote_flags(), base.travel_matrix(), 2, base.tasks(),
                                base.swap_window(), base.seed());
    CHECK(brute_force_optimum(more).best_teu_per_hour >=
          brute_force_optimum(base).best_teu_per_hour);
  }
}

TEST_CASE("TEU per hour arithmetic") {
  std::vector<TaskSpec> tasks;
  SimResult r;
  for (TaskId i = 0; i < 4; ++i) {
    tasks.push_back(unload(i, 1, 2, 10.0, 10.0, 2));
    r.records.push_back(span_record(i, i == 0 ? 0.0 : 100.0, i == 3 ? 1800.0 : 900.0));
  }
  CHECK(compute_teu_per_hour(r, tasks) == 16.0);

  SimResult one;
  one.records.push_back(span_record(0, 100.0, 3700.0));
  CHECK(compute_teu_per_hour(one, {unload(0, 1, 2, 10.0, 10.0, 1)}) == 1.0);

  SimResult flat;
  flat.records.push_back(span_record(0, 5.0, 5.0));
  CHECK_THROWS_AS(compute_teu_per_hour(flat, {unload(0, 1, 2, 10.0, 10.0)}), ScheduleError);
}

TEST_CASE("validate_schedule") {
  const TerminalInstance inst = generate_instance(small_config(2, 3, 3, 12), 11);
  const SimResult good = run_simulation(inst, FifoDispatcher{}, 0);
  CHECK(validate_schedule(good, inst).empty());

  SUBCASE("task assigned to two trucks") {
    SimResult bad = good;
    TaskRecord dup = *good.find(3);
    dup.truck = (dup.truck + 1) % inst.truck_count();
    dup.previous_on_truck.reset();
    bad.records.push_back(dup);
    const auto v = validate_schedule(bad, inst);
    REQUIRE(v.size() == 1);
    CHECK(v[0].constraint == Constraint::single_assignment);
    CHECK(v[0].tasks == std::vector<TaskId>{3});
  }

  SUBCASE("two successors of one task") {
    SimResult bad = good;
    std::vector<TaskRecord*> firsts;
    for (TaskRecord& r : bad.records) {
      if (!r.previous_on_truck) firsts.push_back(&r);
    }
    REQUIRE(firsts.size() >= 2);
    firsts[1]->truck = firsts[0]->truck;
    firsts[1]->previous_on_truck = firsts[0]->task;
    bool flagged = false;
    for (const Violation& x : validate_schedule(bad, inst)) {
      flagged = flagged || x.constraint == Constraint::single_successor;
    }
    CHECK(flagged);
  }

  SUBCASE("unloading order shifted by q + 1") {
    // One quay crane, five yard cranes, a truck per task.
    const TerminalInstance line(1, 5, {false}, travel_matrix(7, 50.0), 5,
                                {unload(0, 1, 2, 10.0, 10.0), unload(1, 1, 3, 10.0, 10.0),
                                 unload(2, 1, 4, 10.0, 10.0), unload(3, 1, 5, 10.0, 10.0),
                                 unload(4, 1, 6, 10.0, 10.0)},
                                3, 0);
    const std::vector<TaskId> served = {4, 0, 1, 2, 3};
    SimResult r;
    for (std::size_t p = 0; p < served.size(); ++p) {
      TaskRecord rec;
      rec.task = served[p];
      rec.truck = served[p];
      rec.start = 50.0;
      rec.source_service_start = 50.0 + 20.0 * static_cast<double>(p);
      rec.source_service_end = rec.source_service_start + 10.0;
      rec.destination_arrival = rec.source_service_end + 50.0;
      rec.destination_service_start = rec.destination_arrival;
      rec.end = rec.destination_service_start + 10.0;
      r.records.push_back(rec);
    }
    const auto v = validate_schedule(r, line);
    REQUIRE(v.size() == 1);
    CHECK(v[0].constraint == Constraint::crane_order);
    CHECK(v[0].tasks == std::vector<TaskId>{4});
  }
}

TEST_CASE("qc_swap_reorder") {
  const std::vector<ReadyTask> three = {{1, 20.0}, {2, 30.0}, {3, 10.0}};
  CHECK(qc_swap_reorder(three, 3) == std::vector<TaskId>{3, 1, 2});
  CHECK(qc_swap_reorder(three, 1) == std::vector<TaskId>{1, 2, 3});

  const std::vector<ReadyTask> five = {{1, 10.0}, {2, 20.0}, {3, 30.0}, {4, 40.0}, {5, 0.0}};
  const auto order = qc_swap_reorder(five, 3);
  CHECK(order.front() == 1);
  CHECK(order == std::vector<TaskId>{1, 2, 5, 3, 4});
}

TEST_CASE("engine holds unloads outside the swap window") {
  std::vector<TaskSpec> tasks;
  for (TaskId i = 0; i < 5; ++i) tasks.push_back(unload(i, 1, 2, 10.0, 10.0));
  const TerminalInstance inst(1, 1, {false}, travel_matrix(3, 40.0), 1, tasks, 3, 0);
  Simulation sim(inst, 0);
  REQUIRE(sim.advance());
  std::vector<TaskId> offered;
  for (const Candidate& c : sim.candidates()) offered.push_back(c.task);
  CHECK(offered == std::vector<TaskId>{0, 1, 2});
}

TEST_CASE("feasibility over random instances and dispatchers") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const TerminalInstance inst = generate_instance(small_config(2, 3, 4, 30), seed);
    for (const auto& [name, dispatcher] : baseline_dispatchers(seed)) {
      CAPTURE(seed);
      CAPTURE(name);
      const SimResult r = run_simulation(inst, *dispatcher, seed);
      CHECK(validate_schedule(r, inst).empty());
      CHECK(r.records.size() == inst.task_count());
    }
  }
}

TEST_CASE("identical inputs give bitwise identical results") {
  const TerminalInstance inst = generate_instance(small_config(2, 4, 6, 60), 21);
  const RandomDispatcher random(9);
  const SimResult a = run_simulation(inst, random, 4, SimOptions{true});
  const SimResult b = run_simulation(inst, random, 4, SimOptions{true});
  CHECK(a == b);
  const SimResult c = run_simulation(inst, random, 5, SimOptions{true});
  CHECK(c.decisions != a.decisions);
}

TEST_CASE("non-finite scores name the decision") {
  struct NanDispatcher : Dispatcher {
    double score(const DecisionPoint& p, const Candidate&) const override {
      return p.index == 2 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    }
  };
  const TerminalInstance inst = generate_instance(small_config(2, 2, 2, 8), 3);
  try {
    run_simulation(inst, NanDispatcher{}, 0);
    FAIL("expected a dispatch error");
  } catch (const DispatchError& e) {
    CHECK(e.decision() == 2);
  }
}

TEST_CASE("instance invariants") {
  const TravelMatrix tau = travel_matrix(3, 10.0);
  CHECK_THROWS_AS(TerminalInstance(1, 1, {false}, tau, 1, {unload(0, 1, 1, 5.0, 5.0)}, 3, 0),
                  InstanceError);
  CHECK_THROWS_AS(TerminalInstance(1, 1, {false}, tau, 0, {unload(0, 1, 2, 5.0, 5.0)}, 3, 0),
                  InstanceError);
  CHECK_THROWS_AS(TerminalInstance(1, 1, {false}, tau, 1, {unload(0, 1, 2, 0.0, 5.0)}, 3, 0),
                  InstanceError);
  CHECK_THROWS_AS(TerminalInstance(1, 1, {false}, tau, 1, {}, 3, 0), InstanceError);
  CHECK_THROWS_AS(TerminalInstance(1, 1, {false}, tau, 1, {unload(0, 1, 2, 5.0, 5.0)}, 0, 0),
                  InstanceError);
  CHECK_THROWS_AS(TerminalInstance(1, 1, {false}, travel_matrix(3, 0.0), 1,
                                   {unload(0, 1, 2, 5.0, 5.0)}, 3, 0),
                  InstanceError);
}
