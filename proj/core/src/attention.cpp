#include "gprt/attention.hpp"

#include <cmath>
#include <stdexcept>

namespace gprt {

Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v, bool causal, Matrix* weights) {
  if (q.cols() != k.cols()) throw std::invalid_argument("attention: query/key width mismatch");
  if (k.rows() != v.rows()) throw std::invalid_argument("attention: key/value length mismatch");
  if (causal && q.rows() > k.rows()) {
    throw std::invalid_argument("attention: causal queries outnumber keys");
  }
  if (q.cols() == 0) throw std::invalid_argument("attention: zero key width");
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  Matrix out = Matrix::Zero(q.rows(), v.cols());
  if (weights) *weights = Matrix::Zero(q.rows(), k.rows());
  Eigen::VectorXd s(k.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    const Eigen::Index n = causal ? i + 1 : k.rows();
    double m = -INFINITY;
    for (Eigen::Index j = 0; j < n; ++j) {
      s[j] = q.row(i).dot(k.row(j)) * scale;
      m = std::max(m, s[j]);
    }
    double z = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      s[j] = std::exp(s[j] - m);
      z += s[j];
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const double p = s[j] / z;
      out.row(i) += p * v.row(j);
      if (weights) (*weights)(i, j) = p;
    }
  }
  return out;
}

}  // namespace gprt
