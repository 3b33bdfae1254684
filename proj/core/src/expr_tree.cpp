#include "gprt/expr_tree.hpp"

#include <algorithm>

namespace gprt {

namespace {

void measure(const ExprNode& node, std::size_t depth, std::size_t& max_depth,
             std::size_t& count) {
  if (node.children.size() != static_cast<std::size_t>(node.token.arity())) {
    throw std::invalid_argument("node '" + std::string(node.token.symbol()) + "' has " +
                                std::to_string(node.children.size()) + " children, arity is " +
                                std::to_string(node.token.arity()));
  }
  ++count;
  max_depth = std::max(max_depth, depth);
  for (const ExprNode& c : node.children) measure(c, depth + 1, max_depth, count);
}

// Locates the preorder-th node; `depth` receives its depth.
const ExprNode* locate(const ExprNode& node, std::size_t& remaining, std::size_t depth,
                       std::size_t& found_depth) {
  if (remaining == 0) {
    found_depth = depth;
    return &node;
  }
  --remaining;
  for (const ExprNode& c : node.children) {
    if (const ExprNode* hit = locate(c, remaining, depth + 1, found_depth)) return hit;
  }
  return nullptr;
}

bool replace(ExprNode& node, std::size_t& remaining, ExprNode& replacement) {
  if (remaining == 0) {
    node = std::move(replacement);
    return true;
  }
  --remaining;
  for (ExprNode& c : node.children) {
    if (replace(c, remaining, replacement)) return true;
  }
  return false;
}

void flatten(const ExprNode& node, TokenSeq& out) {
  out.push_back(node.token);
  for (const ExprNode& c : node.children) flatten(c, out);
}

ExprNode build(std::span<const Token> seq, std::size_t& pos) {
  if (pos >= seq.size()) throw ParseError(seq.size(), "prefix expression ends early");
  const Token t = seq[pos++];
  ExprNode node{t, {}};
  node.children.reserve(static_cast<std::size_t>(t.arity()));
  for (int k = 0; k < t.arity(); ++k) node.children.push_back(build(seq, pos));
  return node;
}

double eval_node(const ExprNode& node, const FeatureVector& fv) {
  switch (node.token.kind()) {
    case TokenKind::feature:
      return fv[node.token.as_feature()];
    case TokenKind::constant:
      return node.token.constant_value();
    case TokenKind::op:
      break;
  }
  const Op op = node.token.as_op();
  const double a = eval_node(node.children[0], fv);
  if (op == Op::if_else) {
    // Both branches are pure; evaluate only the taken one.
    return a != 0.0 ? eval_node(node.children[1], fv) : eval_node(node.children[2], fv);
  }
  return apply_op(op, a, eval_node(node.children[1], fv));
}

}  // namespace

ExprTree::ExprTree(ExprNode root) : root_(std::move(root)) {
  measure(root_, 0, depth_, token_count_);
}

const ExprNode& ExprTree::node_at(std::size_t preorder) const {
  if (preorder >= token_count_) throw std::out_of_range("preorder index out of range");
  std::size_t remaining = preorder;
  std::size_t d = 0;
  return *locate(root_, remaining, 0, d);
}

std::size_t ExprTree::node_depth(std::size_t preorder) const {
  if (preorder >= token_count_) throw std::out_of_range("preorder index out of range");
  std::size_t remaining = preorder;
  std::size_t d = 0;
  locate(root_, remaining, 0, d);
  return d;
}

ExprTree ExprTree::with_subtree(std::size_t preorder, ExprNode replacement) const {
  if (preorder >= token_count_) throw std::out_of_range("preorder index out of range");
  ExprNode copy = root_;
  std::size_t remaining = preorder;
  replace(copy, remaining, replacement);
  return ExprTree(std::move(copy));
}

TokenSeq to_polish(const ExprTree& tree) {
  TokenSeq out;
  out.reserve(tree.token_count());
  flatten(tree.root(), out);
  return out;
}

ExprTree from_polish(std::span<const Token> seq) {
  if (seq.empty()) throw ParseError(0, "empty prefix expression");
  // Budget scan first so errors name the offending index.
  long open = 1;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (open == 0) {
      throw ParseError(i, "token " + std::to_string(i) + " follows a complete expression");
    }
    open += seq[i].arity() - 1;
  }
  if (open != 0) {
    throw ParseError(seq.size(), "prefix expression ends early: " + std::to_string(open) +
                                     " operand(s) missing at end-of-input");
  }
  std::size_t pos = 0;
  return ExprTree(build(seq, pos));
}

bool validate_prefix(std::span<const Token> seq) {
  long open = 1;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (open == 0) return false;
    open += seq[i].arity() - 1;
  }
  return !seq.empty() && open == 0;
}

double eval_expr(const ExprTree& tree, const FeatureVector& features) {
  return eval_node(tree.root(), features);
}

double CompiledExpr::evaluate(const FeatureVector& features) const {
  std::size_t pc = 0;
  return eval_at(pc, features);
}

double CompiledExpr::eval_at(std::size_t& pc, const FeatureVector& fv) const {
  const Token t = program_[pc++];
  switch (t.kind()) {
    case TokenKind::feature:
      return fv[t.as_feature()];
    case TokenKind::constant:
      return t.constant_value();
    case TokenKind::op:
      break;
  }
  const Op op = t.as_op();
  const double a = eval_at(pc, fv);
  const double b = eval_at(pc, fv);
  if (op == Op::if_else) {
    const double c = eval_at(pc, fv);
    return a != 0.0 ? b : c;
  }
  return apply_op(op, a, b);
}

std::string to_string(std::span<const Token> seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ' ';
    out += seq[i].symbol();
  }
  return out;
}

}  // namespace gprt
