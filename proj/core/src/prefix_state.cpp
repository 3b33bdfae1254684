#include "gprt/prefix_state.hpp"

#include <stdexcept>
#include <string>

namespace gprt {

std::size_t Vocabulary::index_of(Token token) {
  switch (token.kind()) {
    case TokenKind::op:
      if (token.raw_index() < kOperatorCount) return token.raw_index();
      break;
    case TokenKind::feature:
      if (token.raw_index() < kFeatureCount) return kOperatorCount + token.raw_index();
      break;
    case TokenKind::constant:
      if (token.raw_index() < kConstantPool.size()) {
        return kOperatorCount + kFeatureCount + token.raw_index();
      }
      break;
  }
  throw std::out_of_range("token is outside the policy vocabulary");
}

Token Vocabulary::token(std::size_t index) {
  if (index >= kEmitSize) throw std::out_of_range("vocabulary index " + std::to_string(index));
  return all_tokens()[index];
}

int Vocabulary::arity(std::size_t index) {
  return index < kOperatorCount ? token(index).arity() : 0;
}

std::vector<std::size_t> Vocabulary::encode(std::span<const Token> seq) {
  std::vector<std::size_t> out;
  out.reserve(seq.size());
  for (const Token& t : seq) out.push_back(index_of(t));
  return out;
}

TokenSeq Vocabulary::decode(std::span<const std::size_t> indices) {
  TokenSeq out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(token(i));
  return out;
}

PrefixState::PrefixState(std::size_t max_len, std::size_t max_depth)
    : max_len_(max_len), max_depth_(max_depth) {
  if (max_len_ < 1) throw std::invalid_argument("max_len must be >= 1");
  frames_.push_back(Frame{Vocabulary::kBos, 1, Vocabulary::kBos, 0});
}

StepContext PrefixState::context() const {
  if (done()) throw std::logic_error("expression is already complete");
  const Frame& f = frames_.back();
  return StepContext{length_, previous_, f.parent, f.last_child, f.depth};
}

bool PrefixState::allowed(std::size_t index) const {
  if (done() || index >= Vocabulary::kEmitSize) return false;
  const auto arity = static_cast<std::size_t>(Vocabulary::arity(index));
  if (arity == 0) return true;
  // Each open slot needs at least one more token.
  if (length_ + 1 + (open_ - 1 + arity) > max_len_) return false;
  return frames_.back().depth < max_depth_;
}

void PrefixState::mask(std::span<std::uint8_t> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = allowed(i) ? 1 : 0;
}

void PrefixState::push(std::size_t index) {
  if (!allowed(index)) {
    throw std::invalid_argument("token index " + std::to_string(index) +
                                " is not allowed at position " + std::to_string(length_));
  }
  Frame& top = frames_.back();
  const std::size_t child_depth = top.depth + 1;
  top.last_child = index;
  if (--top.remaining == 0) frames_.pop_back();
  const auto arity = static_cast<std::size_t>(Vocabulary::arity(index));
  if (arity > 0) frames_.push_back(Frame{index, arity, Vocabulary::kBos, child_depth});
  open_ = open_ - 1 + arity;
  ++length_;
  previous_ = index;
}

}  // namespace gprt
