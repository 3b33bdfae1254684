#ifndef GPRT_HEURISTIC_IO_HPP_
#define GPRT_HEURISTIC_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gprt/expr_tree.hpp"

namespace gprt {

// Heuristic files hold one prefix expression per line as whitespace separated
// symbols; lines starting with '#' and blank lines are ignored. Features are
// written by mnemonic name and read by name or f1..f14 alias.

TokenSeq parse_tokens(std::string_view line);
std::string format_tokens(const TokenSeq& seq);

std::vector<ExprTree> read_heuristics(std::istream& in);
std::vector<ExprTree> read_heuristics(const std::filesystem::path& path);
void write_heuristics(std::ostream& out, const std::vector<ExprTree>& trees,
                      std::string_view header = {});
void write_heuristics(const std::filesystem::path& path, const std::vector<ExprTree>& trees,
                      std::string_view header = {});

}  // namespace gprt

#endif  // GPRT_HEURISTIC_IO_HPP_
