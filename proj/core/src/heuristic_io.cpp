#include "gprt/heuristic_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gprt {

TokenSeq parse_tokens(std::string_view line) {
  TokenSeq seq;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    if (end > pos) {
      const std::string_view symbol = line.substr(pos, end - pos);
      const auto token = Token::parse(symbol);
      if (!token) throw ParseError(seq.size(), "unknown token '" + std::string(symbol) + "'");
      seq.push_back(*token);
    }
    pos = end;
  }
  return seq;
}

std::string format_tokens(const TokenSeq& seq) { return to_string(seq); }

std::vector<ExprTree> read_heuristics(std::istream& in) {
  std::vector<ExprTree> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      out.push_back(from_polish(parse_tokens(line)));
    } catch (const ParseError& e) {
      throw ParseError(e.index(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ExprTree> read_heuristics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open heuristic file " + path.string());
  return read_heuristics(in);
}

void write_heuristics(std::ostream& out, const std::vector<ExprTree>& trees,
                      std::string_view header) {
  if (!header.empty()) {
    std::istringstream lines{std::string(header)};
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << '\n';
  }
  for (const ExprTree& t : trees) out << format_tokens(to_polish(t)) << '\n';
}

void write_heuristics(const std::filesystem::path& path, const std::vector<ExprTree>& trees,
                      std::string_view header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write heuristic file " + path.string());
  write_heuristics(out, trees, header);
}

}  // namespace gprt
