#ifndef GPRT_TOKEN_HPP_
#define GPRT_TOKEN_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gprt/features.hpp"

namespace gprt {

enum class Op : std::uint8_t { add, sub, mul, div, ge, le, if_else, logical_and, logical_or, max, min };

inline constexpr std::size_t kOperatorCount = 11;
inline constexpr std::array<double, 5> kConstantPool = {0.5, 1.0, 2.0, 5.0, 10.0};

enum class TokenKind : std::uint8_t { op, feature, constant };

// One symbol of a dispatch heuristic: an operator, a feature terminal or a
// constant from the shared pool.
class Token {
 public:
  static constexpr Token op(Op o) { return Token(TokenKind::op, static_cast<std::uint8_t>(o)); }
  static constexpr Token feature(Feature f) {
    return Token(TokenKind::feature, static_cast<std::uint8_t>(f));
  }
  static constexpr Token constant(std::size_t pool_index) {
    return Token(TokenKind::constant, static_cast<std::uint8_t>(pool_index));
  }

  // Accepts operator symbols, feature names or f1..f14, and pool constants.
  static std::optional<Token> parse(std::string_view symbol);

  constexpr TokenKind kind() const { return kind_; }
  constexpr Op as_op() const { return static_cast<Op>(index_); }
  constexpr Feature as_feature() const { return static_cast<Feature>(index_); }
  constexpr std::size_t constant_index() const { return index_; }
  constexpr double constant_value() const { return kConstantPool[index_]; }
  constexpr std::uint8_t raw_index() const { return index_; }

  int arity() const;
  bool is_terminal() const { return kind_ != TokenKind::op; }
  std::string_view symbol() const;

  constexpr bool operator==(const Token&) const = default;

 private:
  constexpr Token(TokenKind kind, std::uint8_t index) : kind_(kind), index_(index) {}

  TokenKind kind_;
  std::uint8_t index_;
};

// Every emittable token: operators, then features, then constants.
const std::vector<Token>& all_tokens();
const std::vector<Token>& terminal_tokens();
const std::vector<Token>& operator_tokens();

// Totalized operator semantics. Division by zero yields 1; comparisons and
// logic return 1.0 or 0.0 with nonzero meaning true; arithmetic overflow
// saturates at +-DBL_MAX so finite inputs always give finite outputs.
double apply_op(Op op, double a, double b, double c = 0.0);

}  // namespace gprt

#endif  // GPRT_TOKEN_HPP_
