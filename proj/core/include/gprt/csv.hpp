#ifndef GPRT_CSV_HPP_
#define GPRT_CSV_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gprt/simulation.hpp"

namespace gprt {

// Shortest decimal form that parses back to the same double.
std::string format_number(double value);
double parse_number(std::string_view text);  // throws std::invalid_argument

std::vector<std::string> split_csv_line(std::string_view line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws std::out_of_range when absent.
  std::size_t column(std::string_view name) const;
};

// Throws std::runtime_error when a row's width differs from the header's.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

// task_id,truck_id,s_i,e_i,teu_per_hour,makespan: one row per task by id,
// then "summary,,,,<teu/h>,<makespan>".
void write_result_csv(std::ostream& out, const SimResult& result);

struct ResultRow {
  TaskId task = 0;
  TruckId truck = 0;
  double start = 0.0;
  double end = 0.0;
};

struct ResultFile {
  std::vector<ResultRow> rows;
  double teu_per_hour = 0.0;
  double makespan = 0.0;
};

ResultFile read_result_csv(std::istream& in);

}  // namespace gprt

#endif  // GPRT_CSV_HPP_
