#ifndef GPRT_LSTM_POLICY_HPP_
#define GPRT_LSTM_POLICY_HPP_

#include <limits>

#include "gprt/policy.hpp"

namespace gprt {

// Single-layer LSTM whose input at each step is the concatenated embeddings of
// the slot's parent and left sibling.
class LstmPolicy : public SequencePolicy {
 public:
  explicit LstmPolicy(const PolicyConfig& config);

  std::size_t max_sequence_length() const override {
    return std::numeric_limits<std::size_t>::max();
  }
  std::unique_ptr<SequencePolicy> clone() const override {
    return std::make_unique<LstmPolicy>(*this);
  }

 protected:
  std::unique_ptr<Cursor> cursor() const override;
  std::unique_ptr<Trace> forward(const std::vector<StepContext>& steps,
                                 Matrix& logits) const override;
  void backward(const Trace& trace, const std::vector<StepContext>& steps, const Matrix& dlogits,
                std::span<double> grad) const override;

 private:
  class LstmCursor;
  struct LstmTrace;

  // x: 1 x 2e input, h/c: previous state; writes gates (1 x 4H) and new state.
  void cell(const RowVector& x, const RowVector& h, const RowVector& c, RowVector& gates,
            RowVector& h_out, RowVector& c_out) const;
  RowVector input(const StepContext& ctx) const;

  ParamLayout::Block emb_, w_, u_, b_, wo_, bo_;
};

}  // namespace gprt

#endif  // GPRT_LSTM_POLICY_HPP_
