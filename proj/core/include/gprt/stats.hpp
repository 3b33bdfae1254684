#ifndef GPRT_STATS_HPP_
#define GPRT_STATS_HPP_

#include <cstddef>
#include <span>

namespace gprt {

double mean(std::span<const double> values);
// Sample standard deviation; 0 for fewer than two values.
double sample_stddev(std::span<const double> values);

struct SignTest {
  std::size_t wins = 0;    // a > b
  std::size_t losses = 0;  // a < b
  std::size_t ties = 0;    // dropped from the test
  double p_value = 1.0;    // exact two-sided binomial, p = 1/2
  bool significant = false;
};

// Paired sign test of a against b. Throws std::invalid_argument when the
// spans differ in length.
SignTest sign_test(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

}  // namespace gprt

#endif  // GPRT_STATS_HPP_
