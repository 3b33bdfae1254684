#ifndef GPRT_POLICY_HPP_
#define GPRT_POLICY_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gprt/attention.hpp"
#include "gprt/expr_tree.hpp"
#include "gprt/gp.hpp"
#include "gprt/prefix_state.hpp"

namespace gprt {

enum class PolicyKind { lstm, transformer };

std::string_view policy_kind_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view name);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::lstm;
  std::size_t max_depth = kMaxTreeDepth;
  std::uint64_t seed = 0;
  // LSTM
  std::size_t embedding = 16;
  std::size_t hidden = 32;
  // Transformer
  std::size_t layers = 2;
  std::size_t width = 32;
  std::size_t heads = 2;
  std::size_t ffn = 64;
  std::size_t max_positions = 256;

  void validate() const;
};

struct PolicySample {
  TokenSeq tokens;
  double log_prob = 0.0;
};

// Autoregressive distribution over prefix expressions. Every step applies the
// prefix grammar mask before a softmax over the 30 emittable tokens.
class SequencePolicy {
 public:
  virtual ~SequencePolicy() = default;

  const PolicyConfig& config() const { return config_; }
  PolicyKind kind() const { return config_.kind; }
  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  // Longest sequence the architecture can condition on.
  virtual std::size_t max_sequence_length() const = 0;
  virtual std::unique_ptr<SequencePolicy> clone() const = 0;

  PolicySample sample(Rng& rng, std::size_t max_len) const;

  // Log-probability under the same stepping path as sample(). Returns -inf
  // when a token is masked under `max_len`. Throws std::out_of_range for a
  // token outside the vocabulary and std::invalid_argument for a sequence
  // that is not a complete prefix expression.
  double log_prob(std::span<const Token> seq, std::size_t max_len) const;

  // Adds weight * d log p(seq) / d theta into `grad` using a full forward and
  // backward pass; returns log p. Throws when a token is masked.
  double accumulate_gradient(std::span<const Token> seq, std::size_t max_len, double weight,
                             std::span<double> grad) const;

  // Per-step logits from the full forward pass (rows are positions).
  Matrix forward_logits(std::span<const Token> seq) const;

 protected:
  class Cursor {
   public:
    virtual ~Cursor() = default;
    virtual void logits(const StepContext& ctx, std::span<double> out) = 0;
  };
  struct Trace {
    virtual ~Trace() = default;
  };

  explicit SequencePolicy(PolicyConfig config) : config_(std::move(config)) {}

  virtual std::unique_ptr<Cursor> cursor() const = 0;
  virtual std::unique_ptr<Trace> forward(const std::vector<StepContext>& steps,
                                         Matrix& logits) const = 0;
  virtual void backward(const Trace& trace, const std::vector<StepContext>& steps,
                        const Matrix& dlogits, std::span<double> grad) const = 0;

  PolicyConfig config_;
  std::vector<double> params_;

 private:
  void check_length(std::size_t len) const;
  std::vector<StepContext> contexts(std::span<const std::size_t> indices, std::size_t max_len,
                                    std::vector<std::vector<std::uint8_t>>* masks) const;
};

std::unique_ptr<SequencePolicy> make_policy(const PolicyConfig& config);

// Contiguous parameter blocks inside a flat vector.
class ParamLayout {
 public:
  struct Block {
    std::size_t offset;
    std::size_t rows;
    std::size_t cols;
  };
  Block add(std::size_t rows, std::size_t cols = 1);
  std::size_t size() const { return size_; }

 private:
  std::size_t size_ = 0;
};

using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

inline ConstMatrixMap view(const std::vector<double>& p, const ParamLayout::Block& b) {
  return ConstMatrixMap(p.data() + b.offset, static_cast<Eigen::Index>(b.rows),
                        static_cast<Eigen::Index>(b.cols));
}
inline MatrixMap view(std::span<double> p, const ParamLayout::Block& b) {
  return MatrixMap(p.data() + b.offset, static_cast<Eigen::Index>(b.rows),
                   static_cast<Eigen::Index>(b.cols));
}

}  // namespace gprt

#endif  // GPRT_POLICY_HPP_
