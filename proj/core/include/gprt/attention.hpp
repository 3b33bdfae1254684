#ifndef GPRT_ATTENTION_HPP_
#define GPRT_ATTENTION_HPP_

#include <Eigen/Dense>

namespace gprt {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Scaled dot-product attention softmax(Q K^T / sqrt(d_k)) V. Rows are
// positions. With `causal`, query i sees keys 0..i only; masked scores are
// never computed, so row i depends on nothing after position i. The softmax
// weights are written to `weights` (zero where masked) when provided.
// Throws std::invalid_argument on inconsistent shapes.
Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v, bool causal,
                 Matrix* weights = nullptr);

}  // namespace gprt

#endif  // GPRT_ATTENTION_HPP_
