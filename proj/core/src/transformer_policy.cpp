#include "gprt/transformer_policy.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace gprt {

namespace {

constexpr double kLayerNormEps = 1e-5;
const double kGeluC = std::sqrt(2.0 / std::numbers::pi);

double gelu(double x) { return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + 0.044715 * x * x * x))); }

double gelu_grad(double x) {
  const double t = std::tanh(kGeluC * (x + 0.044715 * x * x * x));
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * 0.044715 * x * x);
}

// Row-wise layer norm; returns the normalized rows and stores 1/sigma.
Matrix layer_norm(const Matrix& z, Vector& inv_std) {
  Matrix n(z.rows(), z.cols());
  inv_std.resize(z.rows());
  const auto d = static_cast<double>(z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double mu = z.row(i).sum() / d;
    const double var = (z.row(i).array() - mu).square().sum() / d;
    inv_std[i] = 1.0 / std::sqrt(var + kLayerNormEps);
    n.row(i) = (z.row(i).array() - mu) * inv_std[i];
  }
  return n;
}

Matrix affine_rows(const Matrix& n, const ConstMatrixMap& g, const ConstMatrixMap& b) {
  Matrix y = n;
  for (Eigen::Index i = 0; i < y.rows(); ++i) y.row(i) = n.row(i).cwiseProduct(g) + b;
  return y;
}

Matrix add_bias(Matrix m, const ConstMatrixMap& b) {
  m.rowwise() += b.row(0);
  return m;
}

// Backward through y = g * n + b, n = layer_norm(z). Returns dz.
Matrix layer_norm_backward(const Matrix& dy, const Matrix& n, const Vector& inv_std,
                           const ConstMatrixMap& g, MatrixMap gg, MatrixMap gb) {
  Matrix dz(dy.rows(), dy.cols());
  const auto d = static_cast<double>(dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    gg += dy.row(i).cwiseProduct(n.row(i));
    gb += dy.row(i);
    const RowVector dn = dy.row(i).cwiseProduct(g);
    const double m1 = dn.sum() / d;
    const double m2 = dn.dot(n.row(i)) / d;
    dz.row(i) = inv_std[i] * (dn.array() - m1 - n.row(i).array() * m2);
  }
  return dz;
}

}  // namespace

struct TransformerPolicy::TransformerTrace : SequencePolicy::Trace {
  struct LayerCache {
    Matrix x, q, k, v, concat, n1, y1, pre, act, n2;
    Vector inv1, inv2;
    std::vector<Matrix> weights;  // per head
  };
  std::vector<LayerCache> layers;
  Matrix final_out;
};

class TransformerPolicy::TransformerCursor : public SequencePolicy::Cursor {
 public:
  explicit TransformerCursor(const TransformerPolicy& p) : p_(p) {
    const auto cap = static_cast<Eigen::Index>(p.config_.max_positions);
    const auto d = static_cast<Eigen::Index>(p.config_.width);
    keys_.assign(p.layers_.size(), Matrix(cap, d));
    values_.assign(p.layers_.size(), Matrix(cap, d));
  }

  void logits(const StepContext& ctx, std::span<double> out) override {
    const auto& P = p_.params_;
    const auto d = static_cast<Eigen::Index>(p_.config_.width);
    const auto heads = static_cast<Eigen::Index>(p_.config_.heads);
    const Eigen::Index dk = d / heads;
    const auto t = static_cast<Eigen::Index>(ctx.position);
    Matrix x = view(P, p_.tok_).row(static_cast<Eigen::Index>(ctx.previous)) +
               view(P, p_.pos_).row(t);
    for (std::size_t l = 0; l < p_.layers_.size(); ++l) {
      const Layer& L = p_.layers_[l];
      const Matrix q = add_bias(x * view(P, L.wq), view(P, L.bq));
      keys_[l].row(t) = add_bias(x * view(P, L.wk), view(P, L.bk));
      values_[l].row(t) = add_bias(x * view(P, L.wv), view(P, L.bv));
      Matrix concat(1, d);
      for (Eigen::Index h = 0; h < heads; ++h) {
        const Matrix kh = keys_[l].block(0, h * dk, t + 1, dk);
        const Matrix vh = values_[l].block(0, h * dk, t + 1, dk);
        const Matrix qh = q.middleCols(h * dk, dk);
        concat.middleCols(h * dk, dk) = attention(qh, kh, vh, false);
      }
      const Matrix a = add_bias(concat * view(P, L.wo), view(P, L.bo));
      Vector inv;
      const Matrix y1 = affine_rows(layer_norm(x + a, inv), view(P, L.ln1_g), view(P, L.ln1_b));
      Matrix act = add_bias(y1 * view(P, L.w1), view(P, L.b1));
      act = act.unaryExpr([](double v) { return gelu(v); });
      const Matrix f = add_bias(act * view(P, L.w2), view(P, L.b2));
      x = affine_rows(layer_norm(y1 + f, inv), view(P, L.ln2_g), view(P, L.ln2_b));
    }
    const Matrix l = add_bias(x * view(P, p_.out_w_), view(P, p_.out_b_));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = l(0, static_cast<Eigen::Index>(i));
  }

 private:
  const TransformerPolicy& p_;
  std::vector<Matrix> keys_, values_;
};

TransformerPolicy::TransformerPolicy(const PolicyConfig& config) : SequencePolicy(config) {
  config_.kind = PolicyKind::transformer;
  config_.validate();
  const std::size_t d = config_.width;
  const std::size_t f = config_.ffn;
  ParamLayout layout;
  tok_ = layout.add(Vocabulary::kSize, d);
  pos_ = layout.add(config_.max_positions, d);
  for (std::size_t l = 0; l < config_.layers; ++l) {
    Layer L;
    L.wq = layout.add(d, d);
    L.wk = layout.add(d, d);
    L.wv = layout.add(d, d);
    L.wo = layout.add(d, d);
    L.bq = layout.add(1, d);
    L.bk = layout.add(1, d);
    L.bv = layout.add(1, d);
    L.bo = layout.add(1, d);
    L.ln1_g = layout.add(1, d);
    L.ln1_b = layout.add(1, d);
    L.w1 = layout.add(d, f);
    L.b1 = layout.add(1, f);
    L.w2 = layout.add(f, d);
    L.b2 = layout.add(1, d);
    L.ln2_g = layout.add(1, d);
    L.ln2_b = layout.add(1, d);
    layers_.push_back(L);
  }
  out_w_ = layout.add(d, Vocabulary::kEmitSize);
  out_b_ = layout.add(1, Vocabulary::kEmitSize);
  params_.assign(layout.size(), 0.0);

  Rng rng(config_.seed);
  auto fill = [&](const ParamLayout::Block& b, double scale) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (std::size_t i = 0; i < b.rows * b.cols; ++i) params_[b.offset + i] = dist(rng);
  };
  auto ones = [&](const ParamLayout::Block& b) {
    for (std::size_t i = 0; i < b.cols; ++i) params_[b.offset + i] = 1.0;
  };
  const double sd = 1.0 / std::sqrt(static_cast<double>(d));
  fill(tok_, 0.1);
  fill(pos_, 0.1);
  for (const Layer& L : layers_) {
    fill(L.wq, sd);
    fill(L.wk, sd);
    fill(L.wv, sd);
    fill(L.wo, sd);
    fill(L.w1, sd);
    fill(L.w2, 1.0 / std::sqrt(static_cast<double>(f)));
    ones(L.ln1_g);
    ones(L.ln2_g);
  }
  fill(out_w_, sd);
}

std::unique_ptr<SequencePolicy::Cursor> TransformerPolicy::cursor() const {
  return std::make_unique<TransformerCursor>(*this);
}

std::unique_ptr<SequencePolicy::Trace> TransformerPolicy::forward(
    const std::vector<StepContext>& steps, Matrix& logits) const {
  const auto& P = params_;
  auto trace = std::make_unique<TransformerTrace>();
  const auto n = static_cast<Eigen::Index>(steps.size());
  const auto d = static_cast<Eigen::Index>(config_.width);
  const auto heads = static_cast<Eigen::Index>(config_.heads);
  const Eigen::Index dk = d / heads;

  Matrix x(n, d);
  for (Eigen::Index t = 0; t < n; ++t) {
    const StepContext& s = steps[static_cast<std::size_t>(t)];
    x.row(t) = view(P, tok_).row(static_cast<Eigen::Index>(s.previous)) +
               view(P, pos_).row(static_cast<Eigen::Index>(s.position));
  }
  for (const Layer& L : layers_) {
    TransformerTrace::LayerCache c;
    c.x = x;
    c.q = add_bias(x * view(P, L.wq), view(P, L.bq));
    c.k = add_bias(x * view(P, L.wk), view(P, L.bk));
    c.v = add_bias(x * view(P, L.wv), view(P, L.bv));
    c.concat.resize(n, d);
    c.weights.resize(static_cast<std::size_t>(heads));
    for (Eigen::Index h = 0; h < heads; ++h) {
      const Matrix qh = c.q.middleCols(h * dk, dk);
      const Matrix kh = c.k.middleCols(h * dk, dk);
      const Matrix vh = c.v.middleCols(h * dk, dk);
      c.concat.middleCols(h * dk, dk) =
          attention(qh, kh, vh, true, &c.weights[static_cast<std::size_t>(h)]);
    }
    const Matrix a = add_bias(c.concat * view(P, L.wo), view(P, L.bo));
    c.n1 = layer_norm(x + a, c.inv1);
    c.y1 = affine_rows(c.n1, view(P, L.ln1_g), view(P, L.ln1_b));
    c.pre = add_bias(c.y1 * view(P, L.w1), view(P, L.b1));
    c.act = c.pre.unaryExpr([](double v) { return gelu(v); });
    const Matrix f = add_bias(c.act * view(P, L.w2), view(P, L.b2));
    c.n2 = layer_norm(c.y1 + f, c.inv2);
    x = affine_rows(c.n2, view(P, L.ln2_g), view(P, L.ln2_b));
    trace->layers.push_back(std::move(c));
  }
  trace->final_out = x;
  logits = add_bias(x * view(P, out_w_), view(P, out_b_));
  return trace;
}

void TransformerPolicy::backward(const Trace& base, const std::vector<StepContext>& steps,
                                 const Matrix& dlogits, std::span<double> grad) const {
  const auto& tr = static_cast<const TransformerTrace&>(base);
  const auto& P = params_;
  const auto d = static_cast<Eigen::Index>(config_.width);
  const auto heads = static_cast<Eigen::Index>(config_.heads);
  const Eigen::Index dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  view(grad, out_w_).noalias() += tr.final_out.transpose() * dlogits;
  view(grad, out_b_) += dlogits.colwise().sum();
  Matrix dx = dlogits * view(P, out_w_).transpose();

  for (auto li = static_cast<std::ptrdiff_t>(layers_.size()) - 1; li >= 0; --li) {
    const Layer& L = layers_[static_cast<std::size_t>(li)];
    const auto& c = tr.layers[static_cast<std::size_t>(li)];

    const Matrix dz2 = layer_norm_backward(dx, c.n2, c.inv2, view(P, L.ln2_g),
                                           view(grad, L.ln2_g), view(grad, L.ln2_b));
    view(grad, L.w2).noalias() += c.act.transpose() * dz2;
    view(grad, L.b2) += dz2.colwise().sum();
    Matrix dpre = dz2 * view(P, L.w2).transpose();
    for (Eigen::Index i = 0; i < dpre.rows(); ++i) {
      for (Eigen::Index j = 0; j < dpre.cols(); ++j) dpre(i, j) *= gelu_grad(c.pre(i, j));
    }
    view(grad, L.w1).noalias() += c.y1.transpose() * dpre;
    view(grad, L.b1) += dpre.colwise().sum();
    const Matrix dy1 = dz2 + dpre * view(P, L.w1).transpose();

    const Matrix dz1 = layer_norm_backward(dy1, c.n1, c.inv1, view(P, L.ln1_g),
                                           view(grad, L.ln1_g), view(grad, L.ln1_b));
    view(grad, L.wo).noalias() += c.concat.transpose() * dz1;
    view(grad, L.bo) += dz1.colwise().sum();
    const Matrix dconcat = dz1 * view(P, L.wo).transpose();

    Matrix dq(dz1.rows(), d), dk_all(dz1.rows(), d), dv(dz1.rows(), d);
    for (Eigen::Index h = 0; h < heads; ++h) {
      const Matrix& w = c.weights[static_cast<std::size_t>(h)];
      const Matrix doh = dconcat.middleCols(h * dk, dk);
      const Matrix vh = c.v.middleCols(h * dk, dk);
      const Matrix dw = doh * vh.transpose();
      dv.middleCols(h * dk, dk) = w.transpose() * doh;
      Matrix ds(w.rows(), w.cols());
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        const double r = w.row(i).dot(dw.row(i));
        ds.row(i) = w.row(i).cwiseProduct((dw.row(i).array() - r).matrix());
      }
      ds *= scale;
      dq.middleCols(h * dk, dk) = ds * c.k.middleCols(h * dk, dk);
      dk_all.middleCols(h * dk, dk) = ds.transpose() * c.q.middleCols(h * dk, dk);
    }
    view(grad, L.wq).noalias() += c.x.transpose() * dq;
    view(grad, L.wk).noalias() += c.x.transpose() * dk_all;
    view(grad, L.wv).noalias() += c.x.transpose() * dv;
    view(grad, L.bq) += dq.colwise().sum();
    view(grad, L.bk) += dk_all.colwise().sum();
    view(grad, L.bv) += dv.colwise().sum();
    dx = dz1 + dq * view(P, L.wq).transpose() + dk_all * view(P, L.wk).transpose() +
         dv * view(P, L.wv).transpose();
  }
  auto gtok = view(grad, tok_);
  auto gpos = view(grad, pos_);
  for (Eigen::Index t = 0; t < dx.rows(); ++t) {
    const StepContext& s = steps[static_cast<std::size_t>(t)];
    gtok.row(static_cast<Eigen::Index>(s.previous)) += dx.row(t);
    gpos.row(static_cast<Eigen::Index>(s.position)) += dx.row(t);
  }
}

}  // namespace gprt
