#ifndef GPRT_PREFIX_STATE_HPP_
#define GPRT_PREFIX_STATE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gprt/expr_tree.hpp"
#include "gprt/token.hpp"

namespace gprt {

// Index <-> token bijection shared by every sequence policy. Indices follow
// all_tokens() (operators, features, constants); BOS comes last and is never
// emitted.
class Vocabulary {
 public:
  static constexpr std::size_t kEmitSize = kOperatorCount + kFeatureCount + kConstantPool.size();
  static constexpr std::size_t kSize = kEmitSize + 1;
  static constexpr std::size_t kBos = kEmitSize;

  static std::size_t index_of(Token token);  // throws std::out_of_range
  static Token token(std::size_t index);     // throws for BOS / out of range
  static int arity(std::size_t index);
  static std::vector<std::size_t> encode(std::span<const Token> seq);
  static TokenSeq decode(std::span<const std::size_t> indices);
};

// What a policy conditions on when emitting the next token.
struct StepContext {
  std::size_t position = 0;  // 0-based index of the token being emitted
  std::size_t previous = Vocabulary::kBos;  // preceding token, BOS at start
  std::size_t parent = Vocabulary::kBos;    // operator owning the slot, BOS at root
  std::size_t sibling = Vocabulary::kBos;   // left sibling, BOS when none
  std::size_t depth = 0;                    // depth of the slot
};

// Incremental prefix grammar: tracks open operand slots and masks tokens that
// would make the expression unfinishable within `max_len` tokens or deeper
// than `max_depth`. Terminals are always allowed, so sampling under the mask
// always closes the expression.
class PrefixState {
 public:
  PrefixState(std::size_t max_len, std::size_t max_depth = kMaxTreeDepth);

  bool done() const { return frames_.empty(); }
  std::size_t length() const { return length_; }
  std::size_t open_slots() const { return open_; }
  StepContext context() const;

  bool allowed(std::size_t index) const;
  // allowed() for every emittable index.
  void mask(std::span<std::uint8_t> out) const;
  void push(std::size_t index);

 private:
  struct Frame {
    std::size_t parent;
    std::size_t remaining;
    std::size_t last_child;
    std::size_t depth;  // depth of this frame's children
  };

  std::size_t max_len_;
  std::size_t max_depth_;
  std::vector<Frame> frames_;
  std::size_t length_ = 0;
  std::size_t open_ = 1;
  std::size_t previous_ = Vocabulary::kBos;
};

}  // namespace gprt

#endif  // GPRT_PREFIX_STATE_HPP_
