#ifndef GPRT_GP_IO_HPP_
#define GPRT_GP_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "gprt/gp.hpp"

namespace gprt {

// Checkpoint layout:
//   # gprt gp checkpoint v1
//   generation <g>
//   rng <engine state>
//   population <M>
//   <fitness>\t<origin>\t<prefix tokens>      (M lines)
// Fitness is written as a hex float (or "unevaluated") so it round-trips
// bit-exact.
struct GpCheckpoint {
  std::size_t generation = 0;
  Rng rng;
  Population population;
};

void write_checkpoint(std::ostream& out, const GpRun& run);
void write_checkpoint(const std::filesystem::path& path, const GpRun& run);
GpCheckpoint read_checkpoint(std::istream& in);
GpCheckpoint read_checkpoint(const std::filesystem::path& path);

// generation,best,mean,median,best_token_count,evaluations
void write_gp_log(std::ostream& out, const std::vector<GenerationStats>& history);

std::string format_double(double value);  // hex float, bit-exact
double parse_double(std::string_view text);

}  // namespace gprt

#endif  // GPRT_GP_IO_HPP_
