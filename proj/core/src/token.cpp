#include "gprt/token.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

namespace gprt {

namespace {

constexpr std::array<std::string_view, kOperatorCount> kOpSymbols = {
    "+", "-", "*", "/", ">=", "<=", "if_else", "and", "or", "max", "min"};
constexpr std::array<int, kOperatorCount> kOpArity = {2, 2, 2, 2, 2, 2, 3, 2, 2, 2, 2};
constexpr std::array<std::string_view, kConstantPool.size()> kConstantSymbols = {
    "0.5", "1", "2", "5", "10"};

double saturate(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return 0.0;
  return x > 0 ? std::numeric_limits<double>::max() : std::numeric_limits<double>::lowest();
}

}  // namespace

std::optional<Feature> parse_feature(std::string_view symbol) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kFeatureNames[i] == symbol) return static_cast<Feature>(i);
  }
  if (symbol.size() >= 2 && symbol[0] == 'f') {
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(symbol.data() + 1, symbol.data() + symbol.size(), k);
    if (ec == std::errc{} && ptr == symbol.data() + symbol.size() && k >= 1 &&
        k <= kFeatureCount && symbol[1] != '0') {
      return static_cast<Feature>(k - 1);
    }
  }
  return std::nullopt;
}

std::optional<Token> Token::parse(std::string_view symbol) {
  for (std::size_t i = 0; i < kOperatorCount; ++i) {
    if (kOpSymbols[i] == symbol) return Token::op(static_cast<Op>(i));
  }
  if (const auto f = parse_feature(symbol)) return Token::feature(*f);
  for (std::size_t i = 0; i < kConstantSymbols.size(); ++i) {
    if (kConstantSymbols[i] == symbol) return Token::constant(i);
  }
  return std::nullopt;
}

int Token::arity() const {
  return kind_ == TokenKind::op ? kOpArity[index_] : 0;
}

std::string_view Token::symbol() const {
  switch (kind_) {
    case TokenKind::op:
      return kOpSymbols[index_];
    case TokenKind::feature:
      return kFeatureNames[index_];
    case TokenKind::constant:
      return kConstantSymbols[index_];
  }
  return {};
}

const std::vector<Token>& operator_tokens() {
  static const std::vector<Token> tokens = [] {
    std::vector<Token> v;
    for (std::size_t i = 0; i < kOperatorCount; ++i) v.push_back(Token::op(static_cast<Op>(i)));
    return v;
  }();
  return tokens;
}

const std::vector<Token>& terminal_tokens() {
  static const std::vector<Token> tokens = [] {
    std::vector<Token> v;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      v.push_back(Token::feature(static_cast<Feature>(i)));
    }
    for (std::size_t i = 0; i < kConstantPool.size(); ++i) v.push_back(Token::constant(i));
    return v;
  }();
  return tokens;
}

const std::vector<Token>& all_tokens() {
  static const std::vector<Token> tokens = [] {
    std::vector<Token> v = operator_tokens();
    const auto& t = terminal_tokens();
    v.insert(v.end(), t.begin(), t.end());
    return v;
  }();
  return tokens;
}

double apply_op(Op op, double a, double b, double c) {
  switch (op) {
    case Op::add:
      return saturate(a + b);
    case Op::sub:
      return saturate(a - b);
    case Op::mul:
      return saturate(a * b);
    case Op::div:
      return b == 0.0 ? 1.0 : saturate(a / b);
    case Op::ge:
      return a >= b ? 1.0 : 0.0;
    case Op::le:
      return a <= b ? 1.0 : 0.0;
    case Op::if_else:
      return a != 0.0 ? b : c;
    case Op::logical_and:
      return (a != 0.0 && b != 0.0) ? 1.0 : 0.0;
    case Op::logical_or:
      return (a != 0.0 || b != 0.0) ? 1.0 : 0.0;
    case Op::max:
      return std::max(a, b);
    case Op::min:
      return std::min(a, b);
  }
  return 0.0;
}

}  // namespace gprt
