#ifndef GPRT_INSTANCE_GEN_HPP_
#define GPRT_INSTANCE_GEN_HPP_

#include <cstddef>
#include <cstdint>

#include "gprt/instance.hpp"

namespace gprt {

// Synthetic terminal: quay cranes on a line, yard cranes on a grid behind
// it, Manhattan travel at constant speed with multiplicative jitter.
// Operation times are truncated normals realized once per task.
struct GeneratorConfig {
  std::size_t quay_cranes = 2;
  std::size_t yard_cranes = 4;
  std::size_t trucks = 6;
  std::size_t tasks = 100;
  std::size_t swap_window = 3;

  double speed = 5.0;            // m/s
  double quay_spacing = 120.0;   // m
  double yard_spacing_x = 150.0;
  double yard_spacing_y = 100.0;
  double yard_offset = 250.0;    // quay line to first yard row
  double jitter = 0.10;          // travel times scaled by U(1, 1 + jitter)
  double qc_mean = 90.0;         // s
  double yc_mean = 120.0;
  double sigma_fraction = 0.25;
  double op_time_floor = 10.0;   // resample below this
  double remote_probability = 0.2;

  static GeneratorConfig desk() { return {}; }
  // 10 QCs, 20 YCs, 60 trucks, 4000 tasks.
  static GeneratorConfig port_scale();
  void validate() const;  // throws std::invalid_argument
};

TerminalInstance generate_instance(const GeneratorConfig& config, std::uint64_t seed);

}  // namespace gprt

#endif  // GPRT_INSTANCE_GEN_HPP_
