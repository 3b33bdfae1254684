#include "gprt/policy.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gprt/lstm_policy.hpp"
#include "gprt/transformer_policy.hpp"

namespace gprt {

namespace {

constexpr std::size_t kEmit = Vocabulary::kEmitSize;

// Log-softmax restricted to allowed entries; masked entries get -inf.
void masked_log_softmax(std::span<const double> logits, std::span<const std::uint8_t> mask,
                        std::span<double> out) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kEmit; ++i) {
    if (mask[i]) m = std::max(m, logits[i]);
  }
  double z = 0.0;
  for (std::size_t i = 0; i < kEmit; ++i) {
    if (mask[i]) z += std::exp(logits[i] - m);
  }
  const double log_z = m + std::log(z);
  for (std::size_t i = 0; i < kEmit; ++i) {
    out[i] = mask[i] ? logits[i] - log_z : -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

std::string_view policy_kind_name(PolicyKind kind) {
  return kind == PolicyKind::lstm ? "lstm" : "transformer";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  if (name == "lstm") return PolicyKind::lstm;
  if (name == "transformer") return PolicyKind::transformer;
  return std::nullopt;
}

void PolicyConfig::validate() const {
  if (kind == PolicyKind::lstm) {
    if (embedding == 0 || hidden == 0) throw std::invalid_argument("LSTM sizes must be positive");
  } else {
    if (layers == 0 || width == 0 || heads == 0 || ffn == 0 || max_positions == 0) {
      throw std::invalid_argument("transformer sizes must be positive");
    }
    if (width % heads != 0) throw std::invalid_argument("width must be divisible by heads");
  }
}

std::unique_ptr<SequencePolicy> make_policy(const PolicyConfig& config) {
  config.validate();
  if (config.kind == PolicyKind::lstm) return std::make_unique<LstmPolicy>(config);
  return std::make_unique<TransformerPolicy>(config);
}

ParamLayout::Block ParamLayout::add(std::size_t rows, std::size_t cols) {
  Block b{size_, rows, cols};
  size_ += rows * cols;
  return b;
}

void SequencePolicy::check_length(std::size_t len) const {
  if (len > max_sequence_length()) {
    throw std::invalid_argument("sequence length " + std::to_string(len) +
                                " exceeds the policy limit " +
                                std::to_string(max_sequence_length()));
  }
}

PolicySample SequencePolicy::sample(Rng& rng, std::size_t max_len) const {
  check_length(max_len);
  PrefixState state(max_len, config_.max_depth);
  auto cur = cursor();
  std::array<double, kEmit> logits{};
  std::array<double, kEmit> logp{};
  std::array<std::uint8_t, kEmit> mask{};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> picked;
  PolicySample out;
  while (!state.done()) {
    const StepContext ctx = state.context();
    cur->logits(ctx, logits);
    state.mask(mask);
    masked_log_softmax(logits, mask, logp);
    const double u = unit(rng);
    double acc = 0.0;
    std::size_t choice = kEmit;
    for (std::size_t i = 0; i < kEmit; ++i) {
      if (!mask[i]) continue;
      choice = i;
      acc += std::exp(logp[i]);
      if (u < acc) break;
    }
    out.log_prob += logp[choice];
    state.push(choice);
    picked.push_back(choice);
  }
  out.tokens = Vocabulary::decode(picked);
  return out;
}

double SequencePolicy::log_prob(std::span<const Token> seq, std::size_t max_len) const {
  const std::vector<std::size_t> indices = Vocabulary::encode(seq);
  if (!validate_prefix(seq)) throw std::invalid_argument("not a complete prefix expression");
  if (seq.size() > max_len) return -std::numeric_limits<double>::infinity();
  check_length(seq.size());
  PrefixState state(max_len, config_.max_depth);
  auto cur = cursor();
  std::array<double, kEmit> logits{};
  std::array<double, kEmit> logp{};
  std::array<std::uint8_t, kEmit> mask{};
  double total = 0.0;
  for (std::size_t idx : indices) {
    if (!state.allowed(idx)) return -std::numeric_limits<double>::infinity();
    cur->logits(state.context(), logits);
    state.mask(mask);
    masked_log_softmax(logits, mask, logp);
    total += logp[idx];
    state.push(idx);
  }
  return total;
}

std::vector<StepContext> SequencePolicy::contexts(
    std::span<const std::size_t> indices, std::size_t max_len,
    std::vector<std::vector<std::uint8_t>>* masks) const {
  PrefixState state(max_len, config_.max_depth);
  std::vector<StepContext> steps;
  steps.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (!state.allowed(idx)) {
      throw std::invalid_argument("token at position " + std::to_string(steps.size()) +
                                  " is masked");
    }
    steps.push_back(state.context());
    if (masks) {
      masks->emplace_back(kEmit);
      state.mask(masks->back());
    }
    state.push(idx);
  }
  return steps;
}

Matrix SequencePolicy::forward_logits(std::span<const Token> seq) const {
  const std::vector<std::size_t> indices = Vocabulary::encode(seq);
  if (!validate_prefix(seq)) throw std::invalid_argument("not a complete prefix expression");
  check_length(seq.size());
  const auto steps = contexts(indices, std::max<std::size_t>(seq.size(), 1), nullptr);
  Matrix logits;
  forward(steps, logits);
  return logits;
}

double SequencePolicy::accumulate_gradient(std::span<const Token> seq, std::size_t max_len,
                                           double weight, std::span<double> grad) const {
  if (grad.size() != params_.size()) throw std::invalid_argument("gradient size mismatch");
  const std::vector<std::size_t> indices = Vocabulary::encode(seq);
  if (!validate_prefix(seq)) throw std::invalid_argument("not a complete prefix expression");
  check_length(seq.size());
  std::vector<std::vector<std::uint8_t>> masks;
  const auto steps = contexts(indices, max_len, &masks);
  Matrix logits;
  const auto trace = forward(steps, logits);
  Matrix dlogits = Matrix::Zero(logits.rows(), logits.cols());
  std::array<double, kEmit> logp{};
  double total = 0.0;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    masked_log_softmax(std::span<const double>(logits.row(row).data(), kEmit), masks[t], logp);
    total += logp[indices[t]];
    for (std::size_t i = 0; i < kEmit; ++i) {
      if (masks[t][i]) dlogits(row, static_cast<Eigen::Index>(i)) = -weight * std::exp(logp[i]);
    }
    dlogits(row, static_cast<Eigen::Index>(indices[t])) += weight;
  }
  backward(*trace, steps, dlogits, grad);
  return total;
}

}  // namespace gprt
