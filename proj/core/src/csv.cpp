#include "gprt/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace gprt {

std::string format_number(double value) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

double parse_number(std::string_view text) {
  double v = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.emplace_back(line.substr(pos, comma == std::string_view::npos ? line.size() - pos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  t.header = split_csv_line(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto row = split_csv_line(line);
    if (row.size() != t.header.size()) {
      throw std::runtime_error("csv line " + std::to_string(line_no) + " has " +
                               std::to_string(row.size()) + " fields, expected " +
                               std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv(in);
}

void write_result_csv(std::ostream& out, const SimResult& result) {
  std::vector<const TaskRecord*> rows;
  for (const TaskRecord& r : result.records) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(), [](const TaskRecord* a, const TaskRecord* b) { return a->task < b->task; });
  out << "task_id,truck_id,s_i,e_i,teu_per_hour,makespan\n";
  for (const TaskRecord* r : rows) {
    out << r->task << ',' << r->truck << ',' << format_number(r->start) << ','
        << format_number(r->end) << ",,\n";
  }
  out << "summary,,,," << format_number(result.teu_per_hour) << ','
      << format_number(result.makespan) << '\n';
}

ResultFile read_result_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  const std::vector<std::string> expected = {"task_id", "truck_id", "s_i", "e_i", "teu_per_hour", "makespan"};
  if (t.header != expected) throw std::runtime_error("unexpected result csv header");
  ResultFile f;
  bool summary = false;
  for (const auto& row : t.rows) {
    if (row[0] == "summary") {
      f.teu_per_hour = parse_number(row[4]);
      f.makespan = parse_number(row[5]);
      summary = true;
      continue;
    }
    f.rows.push_back(ResultRow{std::stoull(row[0]), std::stoull(row[1]), parse_number(row[2]),
                               parse_number(row[3])});
  }
  if (!summary) throw std::runtime_error("result csv lacks a summary row");
  return f;
}

}  // namespace gprt
