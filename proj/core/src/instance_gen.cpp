#include "gprt/instance_gen.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gprt {

GeneratorConfig GeneratorConfig::port_scale() {
  GeneratorConfig c;
  c.quay_cranes = 10;
  c.yard_cranes = 20;
  c.trucks = 60;
  c.tasks = 4000;
  return c;
}

void GeneratorConfig::validate() const {
  if (quay_cranes < 1 || yard_cranes < 1 || trucks < 1 || tasks < 1) {
    throw std::invalid_argument("generator needs at least one QC, YC, truck and task");
  }
  if (swap_window < 1) throw std::invalid_argument("swap window must be >= 1");
  if (!(speed > 0) || !(qc_mean > 0) || !(yc_mean > 0) || !(op_time_floor > 0)) {
    throw std::invalid_argument("speed, mean operation times and floor must be positive");
  }
  if (jitter < 0 || sigma_fraction < 0) throw std::invalid_argument("jitter and sigma must be >= 0");
  if (remote_probability < 0 || remote_probability > 1) {
    throw std::invalid_argument("remote probability must lie in [0, 1]");
  }
}

TerminalInstance generate_instance(const GeneratorConfig& c, std::uint64_t seed) {
  c.validate();
  std::mt19937_64 rng(seed);
  const std::size_t nodes = 1 + c.quay_cranes + c.yard_cranes;

  std::vector<std::pair<double, double>> pos(nodes);
  pos[kDepot] = {-c.quay_spacing, 0.5 * c.yard_offset};
  for (std::size_t q = 0; q < c.quay_cranes; ++q) pos[1 + q] = {q * c.quay_spacing, 0.0};
  const auto columns = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(c.yard_cranes))));
  for (std::size_t y = 0; y < c.yard_cranes; ++y) {
    pos[1 + c.quay_cranes + y] = {static_cast<double>(y % columns) * c.yard_spacing_x,
                                  c.yard_offset + static_cast<double>(y / columns) * c.yard_spacing_y};
  }

  std::uniform_real_distribution<double> jitter(1.0, 1.0 + c.jitter);
  TravelMatrix travel(nodes);
  for (std::size_t a = 0; a < nodes; ++a) {
    for (std::size_t b = 0; b < nodes; ++b) {
      if (a == b) continue;
      const double dist = std::abs(pos[a].first - pos[b].first) + std::abs(pos[a].second - pos[b].second);
      travel(a, b) = dist / c.speed * jitter(rng);
    }
  }

  std::bernoulli_distribution remote_coin(c.remote_probability);
  std::bernoulli_distribution mode_coin(0.5);
  std::vector<bool> remote(c.quay_cranes);
  std::vector<TaskType> mode(c.quay_cranes);
  for (std::size_t q = 0; q < c.quay_cranes; ++q) {
    remote[q] = remote_coin(rng);
    mode[q] = mode_coin(rng) ? TaskType::unload : TaskType::load;
  }

  auto op_time = [&](double mean) {
    std::normal_distribution<double> d(mean, c.sigma_fraction * mean);
    double v = d(rng);
    while (v < c.op_time_floor) v = d(rng);
    return v;
  };
  std::uniform_int_distribution<std::size_t> pick_qc(0, c.quay_cranes - 1);
  std::uniform_int_distribution<std::size_t> pick_yc(0, c.yard_cranes - 1);
  std::uniform_int_distribution<int> pick_size(1, 2);
  std::vector<TaskSpec> tasks;
  tasks.reserve(c.tasks);
  for (std::size_t i = 0; i < c.tasks; ++i) {
    const std::size_t q = pick_qc(rng);
    const NodeId qc = 1 + q;
    const NodeId yc = 1 + c.quay_cranes + pick_yc(rng);
    TaskSpec t;
    t.id = i;
    t.type = mode[q];
    t.size = pick_size(rng);
    const double qc_time = op_time(c.qc_mean);
    const double yc_time = op_time(c.yc_mean);
    if (t.type == TaskType::unload) {
      t.source = qc;
      t.destination = yc;
      t.source_op_time = qc_time;
      t.destination_op_time = yc_time;
    } else {
      t.source = yc;
      t.destination = qc;
      t.source_op_time = yc_time;
      t.destination_op_time = qc_time;
    }
    tasks.push_back(t);
  }
  return TerminalInstance(c.quay_cranes, c.yard_cranes, std::move(remote), std::move(travel),
                          c.trucks, std::move(tasks), c.swap_window, seed);
}

}  // namespace gprt
