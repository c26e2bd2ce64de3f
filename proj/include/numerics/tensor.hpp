#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace numerics {

// Shape/operand mismatch between tensors.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf produced or supplied where a finite value is required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Shape = std::vector<std::size_t>;

namespace detail {
struct Node;
}

// Dense row-major tensor of 64-bit reals with an attached reverse-mode
// autodiff graph. Tensors are cheap handles onto a shared node; graphs are
// single-use: one forward builds the graph, one backward() consumes it.
// Tensors with requires_grad=false are immutable once used in a graph.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> data,
                     bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  // 1xN row vector.
  static Tensor row(std::vector<double> values, bool requires_grad = false);
  // Glorot-uniform initialized matrix, bounds +-sqrt(6/(fan_in+fan_out)).
  static Tensor glorot(std::size_t rows, std::size_t cols,
                       std::mt19937_64& rng);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t size() const;
  std::size_t rows() const;  // 2-D only
  std::size_t cols() const;  // 2-D only

  std::span<const double> data() const;
  // Direct write access; only meaningful for leaf tensors (parameters).
  std::span<double> mutable_data();

  bool requires_grad() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();

  double value() const;               // scalar tensors
  double at(std::size_t r, std::size_t c) const;

  // Reverse pass from a scalar root. Accumulates into leaf grads and then
  // unlinks the graph (single-use tape).
  void backward() const;

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& handle() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

// ---- differentiable operations ----

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
// x: RxC, bias: 1xC broadcast over rows.
Tensor add_rowvec(const Tensor& x, const Tensor& bias);
// x: RxC, weights: Rx1; scales row r by weights[r].
Tensor mul_colvec(const Tensor& x, const Tensor& weights);
Tensor sigmoid(const Tensor& x);
Tensor elu(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);
// Row-wise softmax; with causal_mask=true (square input) entries with
// column > row are excluded from the normalization and output 0.
Tensor softmax_rows(const Tensor& x, bool causal_mask = false);
// Per-row normalization to zero mean / unit variance, then affine gain+bias.
Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                       double eps = 1e-5);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor slice_rows(const Tensor& x, std::size_t r0, std::size_t r1);
Tensor slice_cols(const Tensor& x, std::size_t c0, std::size_t c1);
Tensor reshape(const Tensor& x, Shape shape);
Tensor sum_all(const Tensor& x);

// Scalar kernels shared with the tensor ops; exposed for direct testing.
double sigmoid_scalar(double x);
double elu_scalar(double x);

}  // namespace numerics
