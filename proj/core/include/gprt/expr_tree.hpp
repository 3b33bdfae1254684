#ifndef GPRT_EXPR_TREE_HPP_
#define GPRT_EXPR_TREE_HPP_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gprt/features.hpp"
#include "gprt/token.hpp"

namespace gprt {

inline constexpr std::size_t kMaxTreeDepth = 17;

using TokenSeq = std::vector<Token>;

struct ExprNode {
  Token token;
  std::vector<ExprNode> children;

  bool operator==(const ExprNode&) const = default;
};

class ParseError : public std::invalid_argument {
 public:
  ParseError(std::size_t index, const std::string& what)
      : std::invalid_argument(what), index_(index) {}
  // Offending token position; equals the sequence length for a premature end.
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// An operator tree. Depth counts edges, so a single terminal has depth 0.
// Construction checks arity consistency; the depth bound is the caller's
// concern (see GP variation and seeding).
class ExprTree {
 public:
  explicit ExprTree(ExprNode root);
  static ExprTree leaf(Token terminal) { return ExprTree(ExprNode{terminal, {}}); }

  const ExprNode& root() const { return root_; }
  std::size_t depth() const { return depth_; }
  std::size_t token_count() const { return token_count_; }

  // Preorder addressing, as used by subtree variation.
  const ExprNode& node_at(std::size_t preorder) const;
  std::size_t node_depth(std::size_t preorder) const;
  ExprTree with_subtree(std::size_t preorder, ExprNode replacement) const;

  bool operator==(const ExprTree& other) const { return root_ == other.root_; }

 private:
  ExprNode root_;
  std::size_t depth_ = 0;
  std::size_t token_count_ = 0;
};

TokenSeq to_polish(const ExprTree& tree);
ExprTree from_polish(std::span<const Token> seq);

// True iff the running arity budget (start 1, each token consumes one slot
// and opens `arity` more) reaches zero exactly at the last token.
bool validate_prefix(std::span<const Token> seq);

double eval_expr(const ExprTree& tree, const FeatureVector& features);

// Flattened prefix program for the dispatch hot path; same semantics as
// eval_expr.
class CompiledExpr {
 public:
  explicit CompiledExpr(const ExprTree& tree) : program_(to_polish(tree)) {}
  double evaluate(const FeatureVector& features) const;
  const TokenSeq& program() const { return program_; }

 private:
  double eval_at(std::size_t& pc, const FeatureVector& features) const;
  TokenSeq program_;
};

std::string to_string(std::span<const Token> seq);

}  // namespace gprt

#endif  // GPRT_EXPR_TREE_HPP_
