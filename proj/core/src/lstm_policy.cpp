#include "gprt/lstm_policy.hpp"

#include <cmath>
#include <random>

namespace gprt {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

struct LstmPolicy::LstmTrace : SequencePolicy::Trace {
  std::vector<RowVector> x, gates, h, c;  // h[t], c[t] are the states after step t
};

class LstmPolicy::LstmCursor : public SequencePolicy::Cursor {
 public:
  explicit LstmCursor(const LstmPolicy& p)
      : p_(p), h_(RowVector::Zero(static_cast<Eigen::Index>(p.config_.hidden))), c_(h_) {}

  void logits(const StepContext& ctx, std::span<double> out) override {
    RowVector gates, h, c;
    p_.cell(p_.input(ctx), h_, c_, gates, h, c);
    h_ = std::move(h);
    c_ = std::move(c);
    const RowVector l = h_ * view(p_.params_, p_.wo_) + view(p_.params_, p_.bo_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = l[static_cast<Eigen::Index>(i)];
  }

 private:
  const LstmPolicy& p_;
  RowVector h_, c_;
};

LstmPolicy::LstmPolicy(const PolicyConfig& config) : SequencePolicy(config) {
  config_.kind = PolicyKind::lstm;
  config_.validate();
  const std::size_t e = config_.embedding;
  const std::size_t hd = config_.hidden;
  ParamLayout layout;
  emb_ = layout.add(Vocabulary::kSize, e);
  w_ = layout.add(2 * e, 4 * hd);
  u_ = layout.add(hd, 4 * hd);
  b_ = layout.add(1, 4 * hd);
  wo_ = layout.add(hd, Vocabulary::kEmitSize);
  bo_ = layout.add(1, Vocabulary::kEmitSize);
  params_.assign(layout.size(), 0.0);

  Rng rng(config_.seed);
  auto fill = [&](const ParamLayout::Block& b, double scale) {
    std::uniform_real_distribution<double> d(-scale, scale);
    for (std::size_t i = 0; i < b.rows * b.cols; ++i) params_[b.offset + i] = d(rng);
  };
  fill(emb_, 0.1);
  fill(w_, 1.0 / std::sqrt(static_cast<double>(2 * e)));
  fill(u_, 1.0 / std::sqrt(static_cast<double>(hd)));
  fill(wo_, 1.0 / std::sqrt(static_cast<double>(hd)));
  for (std::size_t j = hd; j < 2 * hd; ++j) params_[b_.offset + j] = 1.0;  // forget gate
}

std::unique_ptr<SequencePolicy::Cursor> LstmPolicy::cursor() const {
  return std::make_unique<LstmCursor>(*this);
}

RowVector LstmPolicy::input(const StepContext& ctx) const {
  const auto e = static_cast<Eigen::Index>(config_.embedding);
  const auto emb = view(params_, emb_);
  RowVector x(2 * e);
  x.head(e) = emb.row(static_cast<Eigen::Index>(ctx.parent));
  x.tail(e) = emb.row(static_cast<Eigen::Index>(ctx.sibling));
  return x;
}

void LstmPolicy::cell(const RowVector& x, const RowVector& h, const RowVector& c,
                      RowVector& gates, RowVector& h_out, RowVector& c_out) const {
  const auto hd = static_cast<Eigen::Index>(config_.hidden);
  RowVector z = x * view(params_, w_) + h * view(params_, u_) + view(params_, b_);
  gates.resize(4 * hd);
  for (Eigen::Index j = 0; j < hd; ++j) {
    gates[j] = sigmoid(z[j]);                   // input
    gates[hd + j] = sigmoid(z[hd + j]);         // forget
    gates[2 * hd + j] = std::tanh(z[2 * hd + j]);  // candidate
    gates[3 * hd + j] = sigmoid(z[3 * hd + j]);  // output
  }
  c_out = gates.segment(hd, hd).cwiseProduct(c) + gates.head(hd).cwiseProduct(gates.segment(2 * hd, hd));
  h_out = gates.tail(hd).cwiseProduct(c_out.array().tanh().matrix());
}

std::unique_ptr<SequencePolicy::Trace> LstmPolicy::forward(const std::vector<StepContext>& steps,
                                                           Matrix& logits) const {
  auto trace = std::make_unique<LstmTrace>();
  const auto hd = static_cast<Eigen::Index>(config_.hidden);
  const auto n = static_cast<Eigen::Index>(steps.size());
  logits.resize(n, static_cast<Eigen::Index>(Vocabulary::kEmitSize));
  RowVector h = RowVector::Zero(hd), c = RowVector::Zero(hd);
  const auto wo = view(params_, wo_);
  const auto bo = view(params_, bo_);
  for (Eigen::Index t = 0; t < n; ++t) {
    RowVector gates, h2, c2;
    RowVector x = input(steps[static_cast<std::size_t>(t)]);
    cell(x, h, c, gates, h2, c2);
    logits.row(t) = h2 * wo + bo;
    trace->x.push_back(std::move(x));
    trace->gates.push_back(std::move(gates));
    trace->h.push_back(h2);
    trace->c.push_back(c2);
    h = std::move(h2);
    c = std::move(c2);
  }
  return trace;
}

void LstmPolicy::backward(const Trace& base, const std::vector<StepContext>& steps,
                          const Matrix& dlogits, std::span<double> grad) const {
  const auto& tr = static_cast<const LstmTrace&>(base);
  const auto hd = static_cast<Eigen::Index>(config_.hidden);
  const auto e = static_cast<Eigen::Index>(config_.embedding);
  const auto w = view(params_, w_);
  const auto u = view(params_, u_);
  const auto wo = view(params_, wo_);
  auto gw = view(grad, w_);
  auto gu = view(grad, u_);
  auto gb = view(grad, b_);
  auto gwo = view(grad, wo_);
  auto gbo = view(grad, bo_);
  auto gemb = view(grad, emb_);

  RowVector dh_next = RowVector::Zero(hd), dc_next = RowVector::Zero(hd);
  const RowVector zero = RowVector::Zero(hd);
  for (auto t = static_cast<Eigen::Index>(steps.size()) - 1; t >= 0; --t) {
    const auto ts = static_cast<std::size_t>(t);
    const RowVector& g = tr.gates[ts];
    const RowVector& c = tr.c[ts];
    const RowVector& c_prev = t > 0 ? tr.c[ts - 1] : zero;
    const RowVector& h_prev = t > 0 ? tr.h[ts - 1] : zero;
    const RowVector dl = dlogits.row(t);

    gwo.noalias() += tr.h[ts].transpose() * dl;
    gbo += dl;
    const RowVector dh = dl * wo.transpose() + dh_next;
    const RowVector tc = c.array().tanh().matrix();
    const RowVector dc =
        dh.cwiseProduct(g.tail(hd)).cwiseProduct((1.0 - tc.array().square()).matrix()) + dc_next;

    RowVector dz(4 * hd);
    for (Eigen::Index j = 0; j < hd; ++j) {
      const double gi = g[j], gf = g[hd + j], gg = g[2 * hd + j], go = g[3 * hd + j];
      dz[j] = dc[j] * gg * gi * (1.0 - gi);
      dz[hd + j] = dc[j] * c_prev[j] * gf * (1.0 - gf);
      dz[2 * hd + j] = dc[j] * gi * (1.0 - gg * gg);
      dz[3 * hd + j] = dh[j] * tc[j] * go * (1.0 - go);
    }
    gw.noalias() += tr.x[ts].transpose() * dz;
    gu.noalias() += h_prev.transpose() * dz;
    gb += dz;
    const RowVector dx = dz * w.transpose();
    gemb.row(static_cast<Eigen::Index>(steps[ts].parent)) += dx.head(e);
    gemb.row(static_cast<Eigen::Index>(steps[ts].sibling)) += dx.tail(e);
    dh_next = dz * u.transpose();
    dc_next = dc.cwiseProduct(g.segment(hd, hd));
  }
}

}  // namespace gprt
