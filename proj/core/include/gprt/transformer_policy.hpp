#ifndef GPRT_TRANSFORMER_POLICY_HPP_
#define GPRT_TRANSFORMER_POLICY_HPP_

#include "gprt/policy.hpp"

namespace gprt {

// Decoder-only post-norm Transformer over the token prefix, with learned
// positional embeddings and a BOS token at position 0. Sampling keeps a
// per-layer key/value cache.
class TransformerPolicy : public SequencePolicy {
 public:
  explicit TransformerPolicy(const PolicyConfig& config);

  std::size_t max_sequence_length() const override { return config_.max_positions; }
  std::unique_ptr<SequencePolicy> clone() const override {
    return std::make_unique<TransformerPolicy>(*this);
  }

 protected:
  std::unique_ptr<Cursor> cursor() const override;
  std::unique_ptr<Trace> forward(const std::vector<StepContext>& steps,
                                 Matrix& logits) const override;
  void backward(const Trace& trace, const std::vector<StepContext>& steps, const Matrix& dlogits,
                std::span<double> grad) const override;

 private:
  class TransformerCursor;
  struct TransformerTrace;
  struct Layer {
    ParamLayout::Block wq, wk, wv, wo, bq, bk, bv, bo, ln1_g, ln1_b, w1, b1, w2, b2, ln2_g, ln2_b;
  };

  ParamLayout::Block tok_, pos_, out_w_, out_b_;
  std::vector<Layer> layers_;
};

}  // namespace gprt

#endif  // GPRT_TRANSFORMER_POLICY_HPP_
