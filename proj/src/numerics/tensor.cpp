#include "numerics/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>
#include <utility>

namespace numerics {

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // allocated lazily, same length as data
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;
  const char* op = "leaf";

  ~Node() {
    // Iterative unlink so long chain graphs (LSTM tapes) never recurse
    // deeply during destruction.
    std::vector<std::shared_ptr<Node>> work;
    work.swap(parents);
    while (!work.empty()) {
      std::shared_ptr<Node> p = std::move(work.back());
      work.pop_back();
      if (p && p.use_count() == 1) {
        for (auto& gp : p->parents) work.push_back(std::move(gp));
        p->parents.clear();
      }
    }
  }
};

}  // namespace detail

using detail::Node;

namespace {

std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t e : s) {
    if (e == 0) throw ShapeError("tensor extents must be positive");
    n *= e;
  }
  return n;
}

void ensure_finite(std::span<const double> values, const char* op) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite value produced by ") + op);
    }
  }
}

std::shared_ptr<Node> make_leaf(Shape shape, std::vector<double> data,
                                bool requires_grad) {
  if (shape_size(shape) != data.size()) {
    throw ShapeError("tensor data length does not match shape");
  }
  ensure_finite(data, "tensor construction");
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->data = std::move(data);
  n->requires_grad = requires_grad;
  if (requires_grad) n->grad.assign(n->data.size(), 0.0);
  return n;
}

// Builds an op node; the backward callback is retained only when some parent
// participates in differentiation.
Tensor op_node(Shape shape, std::vector<double> data,
               std::initializer_list<Tensor> parents,
               std::function<void(Node&)> backward, const char* op) {
  ensure_finite(data, op);
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->data = std::move(data);
  n->op = op;
  bool req = false;
  n->parents.reserve(parents.size());
  for (const Tensor& p : parents) {
    if (!p.defined()) throw ShapeError("undefined operand");
    req = req || p.requires_grad();
    n->parents.push_back(p.handle());
  }
  n->requires_grad = req;
  if (req) n->backward_fn = std::move(backward);
  return Tensor{std::move(n)};
}

bool wants_grad(const Node* n) { return n->requires_grad; }

std::span<double> grad_of(Node* n) {
  if (n->grad.empty()) n->grad.assign(n->data.size(), 0.0);
  return n->grad;
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": operand shapes differ");
  }
}

void check_2d(const Tensor& t, const char* op) {
  if (t.shape().size() != 2) {
    throw ShapeError(std::string(op) + ": 2-D tensor required");
  }
}

}  // namespace

// --- Tensor basics ---

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  std::size_t n = shape_size(shape);
  return Tensor{
      make_leaf(std::move(shape), std::vector<double>(n, 0.0), requires_grad)};
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  std::size_t n = shape_size(shape);
  return Tensor{make_leaf(std::move(shape), std::vector<double>(n, value),
                          requires_grad)};
}

Tensor Tensor::from(Shape shape, std::vector<double> data, bool requires_grad) {
  return Tensor{make_leaf(std::move(shape), std::move(data), requires_grad)};
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from({1}, {value}, requires_grad);
}

Tensor Tensor::row(std::vector<double> values, bool requires_grad) {
  Shape s{1, values.size()};
  return from(std::move(s), std::move(values), requires_grad);
}

Tensor Tensor::glorot(std::size_t rows, std::size_t cols,
                      std::mt19937_64& rng) {
  double bound = std::sqrt(6.0 / double(rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> v(rows * cols);
  for (double& x : v) x = dist(rng);
  return from({rows, cols}, std::move(v), true);
}

const Shape& Tensor::shape() const {
  if (!node_) throw ShapeError("undefined tensor");
  return node_->shape;
}

std::size_t Tensor::size() const { return node_ ? node_->data.size() : 0; }

std::size_t Tensor::rows() const {
  const Shape& s = shape();
  if (s.size() != 2) throw ShapeError("rows() requires a 2-D tensor");
  return s[0];
}

std::size_t Tensor::cols() const {
  const Shape& s = shape();
  if (s.size() != 2) throw ShapeError("cols() requires a 2-D tensor");
  return s[1];
}

std::span<const double> Tensor::data() const {
  if (!node_) throw ShapeError("undefined tensor");
  return node_->data;
}

std::span<double> Tensor::mutable_data() {
  if (!node_) throw ShapeError("undefined tensor");
  return node_->data;
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

std::span<const double> Tensor::grad() const {
  if (!node_ || !node_->requires_grad) {
    throw ShapeError("tensor does not track gradients");
  }
  if (node_->grad.empty()) node_->grad.assign(node_->data.size(), 0.0);
  return node_->grad;
}

std::span<double> Tensor::mutable_grad() {
  if (!node_ || !node_->requires_grad) {
    throw ShapeError("tensor does not track gradients");
  }
  if (node_->grad.empty()) node_->grad.assign(node_->data.size(), 0.0);
  return node_->grad;
}

void Tensor::zero_grad() {
  if (node_ && node_->requires_grad) {
    node_->grad.assign(node_->data.size(), 0.0);
  }
}

double Tensor::value() const {
  if (size() != 1) throw ShapeError("value() requires a scalar tensor");
  return node_->data[0];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  if (r >= rows() || c >= cols()) throw ShapeError("at() index out of range");
  return node_->data[r * cols() + c];
}

void Tensor::backward() const {
  Node* root = node_.get();
  if (!root) throw ShapeError("backward on undefined tensor");
  if (root->data.size() != 1) throw ShapeError("backward requires a scalar root");
  if (!root->requires_grad) {
    throw ShapeError("backward root does not require gradients");
  }

  // Iterative post-order over the requires_grad subgraph.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  struct Frame {
    Node* node;
    std::size_t next_parent;
  };
  std::vector<Frame> stack;
  stack.push_back({root, 0});
  visited.insert(root);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent < f.node->parents.size()) {
      Node* p = f.node->parents[f.next_parent].get();
      ++f.next_parent;
      if (p && p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.push_back({p, 0});
      }
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }

  for (Node* n : order) {
    if (n->grad.empty()) n->grad.assign(n->data.size(), 0.0);
  }
  root->grad[0] += 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward_fn) (*it)->backward_fn(**it);
  }

  // The tape is single-use: unlink so intermediates free promptly and graph
  // teardown stays shallow.
  for (Node* n : order) {
    n->parents.clear();
    n->backward_fn = nullptr;
  }
}

// --- operations ---

Tensor matmul(const Tensor& a, const Tensor& b) {
  check_2d(a, "matmul");
  check_2d(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), k2 = b.rows(), n = b.cols();
  if (k != k2) throw ShapeError("matmul: inner dimensions disagree");

  std::vector<double> out(m * n, 0.0);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      if (av == 0.0) continue;
      const double* brow = pb + p * n;
      double* crow = out.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }

  Node* na = a.node();
  Node* nb = b.node();
  return op_node(
      {m, n}, std::move(out), {a, b},
      [na, nb, m, k, n](Node& self) {
        const double* dc = self.grad.data();
        if (wants_grad(na)) {
          double* da = grad_of(na).data();
          const double* pb2 = nb->data.data();
          // dA = dC * B^T
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
              double acc = 0.0;
              const double* dcrow = dc + i * n;
              const double* brow = pb2 + p * n;
              for (std::size_t j = 0; j < n; ++j) acc += dcrow[j] * brow[j];
              da[i * k + p] += acc;
            }
          }
        }
        if (wants_grad(nb)) {
          double* db = grad_of(nb).data();
          const double* pa2 = na->data.data();
          // dB = A^T * dC
          for (std::size_t i = 0; i < m; ++i) {
            const double* dcrow = dc + i * n;
            for (std::size_t p = 0; p < k; ++p) {
              const double av = pa2[i * k + p];
              if (av == 0.0) continue;
              double* dbrow = db + p * n;
              for (std::size_t j = 0; j < n; ++j) dbrow[j] += av * dcrow[j];
            }
          }
        }
      },
      "matmul");
}

Tensor transpose(const Tensor& a) {
  check_2d(a, "transpose");
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * c);
  const double* p = a.data().data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = p[i * c + j];
  Node* na = a.node();
  return op_node(
      {c, r}, std::move(out), {a},
      [na, r, c](Node& self) {
        if (!wants_grad(na)) return;
        double* da = grad_of(na).data();
        const double* g = self.grad.data();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) da[i * c + j] += g[j * r + i];
      },
      "transpose");
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] + pb[i];
  Node* na = a.node();
  Node* nb = b.node();
  return op_node(
      a.shape(), std::move(out), {a, b},
      [na, nb](Node& self) {
        const double* g = self.grad.data();
        if (wants_grad(na)) {
          double* da = grad_of(na).data();
          for (std::size_t i = 0; i < self.data.size(); ++i) da[i] += g[i];
        }
        if (wants_grad(nb)) {
          double* db = grad_of(nb).data();
          for (std::size_t i = 0; i < self.data.size(); ++i) db[i] += g[i];
        }
      },
      "add");
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] - pb[i];
  Node* na = a.node();
  Node* nb = b.node();
  return op_node(
      a.shape(), std::move(out), {a, b},
      [na, nb](Node& self) {
        const double* g = self.grad.data();
        if (wants_grad(na)) {
          double* da = grad_of(na).data();
          for (std::size_t i = 0; i < self.data.size(); ++i) da[i] += g[i];
        }
        if (wants_grad(nb)) {
          double* db = grad_of(nb).data();
          for (std::size_t i = 0; i < self.data.size(); ++i) db[i] -= g[i];
        }
      },
      "sub");
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "hadamard");
  std::vector<double> out(a.size());
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] * pb[i];
  Node* na = a.node();
  Node* nb = b.node();
  return op_node(
      a.shape(), std::move(out), {a, b},
      [na, nb](Node& self) {
        const double* g = self.grad.data();
        if (wants_grad(na)) {
          double* da = grad_of(na).data();
          const double* pb2 = nb->data.data();
          for (std::size_t i = 0; i < self.data.size(); ++i)
            da[i] += g[i] * pb2[i];
        }
        if (wants_grad(nb)) {
          double* db = grad_of(nb).data();
          const double* pa2 = na->data.data();
          for (std::size_t i = 0; i < self.data.size(); ++i)
            db[i] += g[i] * pa2[i];
        }
      },
      "hadamard");
}

Tensor scale(const Tensor& a, double factor) {
  if (!std::isfinite(factor)) throw NumericError("scale: non-finite factor");
  std::vector<double> out(a.size());
  const double* pa = a.data().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] * factor;
  Node* na = a.node();
  return op_node(
      a.shape(), std::move(out), {a},
      [na, factor](Node& self) {
        if (!wants_grad(na)) return;
        double* da = grad_of(na).data();
        const double* g = self.grad.data();
        for (std::size_t i = 0; i < self.data.size(); ++i)
          da[i] += g[i] * factor;
      },
      "scale");
}

Tensor add_rowvec(const Tensor& x, const Tensor& bias) {
  check_2d(x, "add_rowvec");
  check_2d(bias, "add_rowvec");
  if (bias.rows() != 1 || bias.cols() != x.cols()) {
    throw ShapeError("add_rowvec: bias must be 1 x cols(x)");
  }
  const std::size_t r = x.rows(), c = x.cols();
  std::vector<double> out(r * c);
  const double* px = x.data().data();
  const double* pb = bias.data().data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] = px[i * c + j] + pb[j];
  Node* nx = x.node();
  Node* nb = bias.node();
  return op_node(
      x.shape(), std::move(out), {x, bias},
      [nx, nb, r, c](Node& self) {
        const double* g = self.grad.data();
        if (wants_grad(nx)) {
          double* dx = grad_of(nx).data();
          for (std::size_t i = 0; i < r * c; ++i) dx[i] += g[i];
        }
        if (wants_grad(nb)) {
          double* db = grad_of(nb).data();
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) db[j] += g[i * c + j];
        }
      },
      "add_rowvec");
}

Tensor mul_colvec(const Tensor& x, const Tensor& weights) {
  check_2d(x, "mul_colvec");
  check_2d(weights, "mul_colvec");
  if (weights.cols() != 1 || weights.rows() != x.rows()) {
    throw ShapeError("mul_colvec: weights must be rows(x) x 1");
  }
  const std::size_t r = x.rows(), c = x.cols();
  std::vector<double> out(r * c);
  const double* px = x.data().data();
  const double* pw = weights.data().data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] = px[i * c + j] * pw[i];
  Node* nx = x.node();
  Node* nw = weights.node();
  return op_node(
      x.shape(), std::move(out), {x, weights},
      [nx, nw, r, c](Node& self) {
        const double* g = self.grad.data();
        if (wants_grad(nx)) {
          double* dx = grad_of(nx).data();
          const double* pw2 = nw->data.data();
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
              dx[i * c + j] += g[i * c + j] * pw2[i];
        }
        if (wants_grad(nw)) {
          double* dw = grad_of(nw).data();
          const double* px2 = nx->data.data();
          for (std::size_t i = 0; i < r; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < c; ++j)
              acc += g[i * c + j] * px2[i * c + j];
            dw[i] += acc;
          }
        }
      },
      "mul_colvec");
}

double sigmoid_scalar(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

double elu_scalar(double x) { return x >= 0.0 ? x : std::expm1(x); }

Tensor sigmoid(const Tensor& x) {
  std::vector<double> out(x.size());
  const double* px = x.data().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigmoid_scalar(px[i]);
  Node* nx = x.node();
  return op_node(
      x.shape(), std::move(out), {x},
      [nx](Node& self) {
        if (!wants_grad(nx)) return;
        double* dx = grad_of(nx).data();
        const double* g = self.grad.data();
        const double* y = self.data.data();
        for (std::size_t i = 0; i < self.data.size(); ++i)
          dx[i] += g[i] * y[i] * (1.0 - y[i]);
      },
      "sigmoid");
}

Tensor elu(const Tensor& x) {
  std::vector<double> out(x.size());
  const double* px = x.data().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = elu_scalar(px[i]);
  Node* nx = x.node();
  return op_node(
      x.shape(), std::move(out), {x},
      [nx](Node& self) {
        if (!wants_grad(nx)) return;
        double* dx = grad_of(nx).data();
        const double* g = self.grad.data();
        const double* y = self.data.data();
        const double* px2 = nx->data.data();
        for (std::size_t i = 0; i < self.data.size(); ++i) {
          // d/dx elu = 1 for x >= 0, exp(x) = y + 1 for x < 0
          dx[i] += g[i] * (px2[i] >= 0.0 ? 1.0 : y[i] + 1.0);
        }
      },
      "elu");
}

Tensor tanh(const Tensor& x) {
  std::vector<double> out(x.size());
  const double* px = x.data().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(px[i]);
  Node* nx = x.node();
  return op_node(
      x.shape(), std::move(out), {x},
      [nx](Node& self) {
        if (!wants_grad(nx)) return;
        double* dx = grad_of(nx).data();
        const double* g = self.grad.data();
        const double* y = self.data.data();
        for (std::size_t i = 0; i < self.data.size(); ++i)
          dx[i] += g[i] * (1.0 - y[i] * y[i]);
      },
      "tanh");
}

Tensor relu(const Tensor& x) {
  std::vector<double> out(x.size());
  const double* px = x.data().data();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = px[i] > 0.0 ? px[i] : 0.0;
  Node* nx = x.node();
  return op_node(
      x.shape(), std::move(out), {x},
      [nx](Node& self) {
        if (!wants_grad(nx)) return;
        double* dx = grad_of(nx).data();
        const double* g = self.grad.data();
        const double* px2 = nx->data.data();
        // subgradient 0 at the kink
        for (std::size_t i = 0; i < self.data.size(); ++i)
          if (px2[i] > 0.0) dx[i] += g[i];
      },
      "relu");
}

Tensor softmax_rows(const Tensor& x, bool causal_mask) {
  check_2d(x, "softmax_rows");
  const std::size_t r = x.rows(), c = x.cols();
  if (causal_mask && r != c) {
    throw ShapeError("softmax_rows: causal mask requires a square matrix");
  }
  std::vector<double> out(r * c, 0.0);
  const double* px = x.data().data();
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t limit = causal_mask ? i + 1 : c;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < limit; ++j) mx = std::max(mx, px[i * c + j]);
    double denom = 0.0;
    for (std::size_t j = 0; j < limit; ++j) {
      double e = std::exp(px[i * c + j] - mx);
      out[i * c + j] = e;
      denom += e;
    }
    for (std::size_t j = 0; j < limit; ++j) out[i * c + j] /= denom;
  }
  Node* nx = x.node();
  return op_node(
      {r, c}, std::move(out), {x},
      [nx, r, c, causal_mask](Node& self) {
        if (!wants_grad(nx)) return;
        double* dx = grad_of(nx).data();
        const double* g = self.grad.data();
        const double* y = self.data.data();
        for (std::size_t i = 0; i < r; ++i) {
          const std::size_t limit = causal_mask ? i + 1 : c;
          double dot = 0.0;
          for (std::size_t j = 0; j < limit; ++j)
            dot += g[i * c + j] * y[i * c + j];
          for (std::size_t j = 0; j < limit; ++j)
            dx[i * c + j] += y[i * c + j] * (g[i * c + j] - dot);
        }
      },
      "softmax_rows");
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                       double eps) {
  check_2d(x, "layer_norm_rows");
  const std::size_t r = x.rows(), c = x.cols();
  if (gain.size() != c || bias.size() != c) {
    throw ShapeError("layer_norm_rows: gain/bias length must equal cols(x)");
  }
  std::vector<double> out(r * c);
  std::vector<double> xhat(r * c);
  std::vector<double> inv_std(r);
  const double* px = x.data().data();
  const double* pg = gain.data().data();
  const double* pb = bias.data().data();
  for (std::size_t i = 0; i < r; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < c; ++j) mean += px[i * c + j];
    mean /= double(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      double d = px[i * c + j] - mean;
      var += d * d;
    }
    var /= double(c);
    double is = 1.0 / std::sqrt(var + eps);
    inv_std[i] = is;
    for (std::size_t j = 0; j < c; ++j) {
      double h = (px[i * c + j] - mean) * is;
      xhat[i * c + j] = h;
      out[i * c + j] = pg[j] * h + pb[j];
    }
  }
  Node* nx = x.node();
  Node* ng = gain.node();
  Node* nb = bias.node();
  return op_node(
      {r, c}, std::move(out), {x, gain, bias},
      [nx, ng, nb, r, c, xhat = std::move(xhat),
       inv_std = std::move(inv_std)](Node& self) {
        const double* g = self.grad.data();
        const double* pg2 = ng->data.data();
        if (wants_grad(ng)) {
          double* dg = grad_of(ng).data();
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
              dg[j] += g[i * c + j] * xhat[i * c + j];
        }
        if (wants_grad(nb)) {
          double* db = grad_of(nb).data();
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) db[j] += g[i * c + j];
        }
        if (wants_grad(nx)) {
          double* dx = grad_of(nx).data();
          for (std::size_t i = 0; i < r; ++i) {
            double mean_dy = 0.0, mean_dyxh = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
              double dy = g[i * c + j] * pg2[j];
              mean_dy += dy;
              mean_dyxh += dy * xhat[i * c + j];
            }
            mean_dy /= double(c);
            mean_dyxh /= double(c);
            for (std::size_t j = 0; j < c; ++j) {
              double dy = g[i * c + j] * pg2[j];
              dx[i * c + j] +=
                  inv_std[i] * (dy - mean_dy - xhat[i * c + j] * mean_dyxh);
            }
          }
        }
      },
      "layer_norm_rows");
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: empty input");
  check_2d(parts[0], "concat_rows");
  const std::size_t c = parts[0].cols();
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    check_2d(p, "concat_rows");
    if (p.cols() != c) throw ShapeError("concat_rows: column counts differ");
    total += p.rows();
  }
  std::vector<double> out;
  out.reserve(total * c);
  for (const Tensor& p : parts) {
    auto d = p.data();
    out.insert(out.end(), d.begin(), d.end());
  }
  auto n = std::make_shared<Node>();
  n->shape = {total, c};
  n->data = std::move(out);
  n->op = "concat_rows";
  bool req = false;
  std::vector<Node*> raw;
  raw.reserve(parts.size());
  for (const Tensor& p : parts) {
    req = req || p.requires_grad();
    n->parents.push_back(p.handle());
    raw.push_back(p.node());
  }
  n->requires_grad = req;
  if (req) {
    n->backward_fn = [raw = std::move(raw)](Node& self) {
      const double* g = self.grad.data();
      std::size_t offset = 0;
      for (Node* p : raw) {
        const std::size_t len = p->data.size();
        if (wants_grad(p)) {
          double* dp = grad_of(p).data();
          for (std::size_t i = 0; i < len; ++i) dp[i] += g[offset + i];
        }
        offset += len;
      }
    };
  }
  return Tensor{std::move(n)};
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: empty input");
  check_2d(parts[0], "concat_cols");
  const std::size_t r = parts[0].rows();
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    check_2d(p, "concat_cols");
    if (p.rows() != r) throw ShapeError("concat_cols: row counts differ");
    total += p.cols();
  }
  std::vector<double> out(r * total);
  std::size_t col0 = 0;
  for (const Tensor& p : parts) {
    const std::size_t pc = p.cols();
    const double* pd = p.data().data();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < pc; ++j)
        out[i * total + col0 + j] = pd[i * pc + j];
    col0 += pc;
  }
  auto n = std::make_shared<Node>();
  n->shape = {r, total};
  n->data = std::move(out);
  n->op = "concat_cols";
  bool req = false;
  std::vector<Node*> raw;
  std::vector<std::size_t> widths;
  for (const Tensor& p : parts) {
    req = req || p.requires_grad();
    n->parents.push_back(p.handle());
    raw.push_back(p.node());
    widths.push_back(p.cols());
  }
  n->requires_grad = req;
  if (req) {
    n->backward_fn = [raw = std::move(raw), widths = std::move(widths), r,
                      total](Node& self) {
      const double* g = self.grad.data();
      std::size_t col0 = 0;
      for (std::size_t pi = 0; pi < raw.size(); ++pi) {
        Node* p = raw[pi];
        const std::size_t pc = widths[pi];
        if (wants_grad(p)) {
          double* dp = grad_of(p).data();
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < pc; ++j)
              dp[i * pc + j] += g[i * total + col0 + j];
        }
        col0 += pc;
      }
    };
  }
  return Tensor{std::move(n)};
}

Tensor slice_rows(const Tensor& x, std::size_t r0, std::size_t r1) {
  check_2d(x, "slice_rows");
  const std::size_t r = x.rows(), c = x.cols();
  if (r0 >= r1 || r1 > r) throw ShapeError("slice_rows: bad range");
  std::vector<double> out(x.data().begin() + r0 * c,
                          x.data().begin() + r1 * c);
  Node* nx = x.node();
  return op_node(
      {r1 - r0, c}, std::move(out), {x},
      [nx, r0, c](Node& self) {
        if (!wants_grad(nx)) return;
        double* dx = grad_of(nx).data();
        const double* g = self.grad.data();
        for (std::size_t i = 0; i < self.data.size(); ++i)
          dx[r0 * c + i] += g[i];
      },
      "slice_rows");
}

Tensor slice_cols(const Tensor& x, std::size_t c0, std::size_t c1) {
  check_2d(x, "slice_cols");
  const std::size_t r = x.rows(), c = x.cols();
  if (c0 >= c1 || c1 > c) throw ShapeError("slice_cols: bad range");
  const std::size_t w = c1 - c0;
  std::vector<double> out(r * w);
  const double* px = x.data().data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = px[i * c + c0 + j];
  Node* nx = x.node();
  return op_node(
      {r, w}, std::move(out), {x},
      [nx, r, c, c0, w](Node& self) {
        if (!wants_grad(nx)) return;
        double* dx = grad_of(nx).data();
        const double* g = self.grad.data();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < w; ++j)
            dx[i * c + c0 + j] += g[i * w + j];
      },
      "slice_cols");
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size()) {
    throw ShapeError("reshape: element count mismatch");
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  Node* nx = x.node();
  return op_node(
      std::move(shape), std::move(out), {x},
      [nx](Node& self) {
        if (!wants_grad(nx)) return;
        double* dx = grad_of(nx).data();
        const double* g = self.grad.data();
        for (std::size_t i = 0; i < self.data.size(); ++i) dx[i] += g[i];
      },
      "reshape");
}

Tensor sum_all(const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  Node* nx = x.node();
  return op_node(
      {1}, {total}, {x},
      [nx](Node& self) {
        if (!wants_grad(nx)) return;
        double* dx = grad_of(nx).data();
        const double g = self.grad[0];
        for (std::size_t i = 0; i < nx->data.size(); ++i) dx[i] += g;
      },
      "sum_all");
}

}  // namespace numerics
