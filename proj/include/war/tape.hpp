#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <span>
#include <vector>

#include "war/tensor.hpp"

namespace war {

enum class OpKind {
  leaf,
  matmul,
  add,
  sub,
  mul,
  div,
  exp,
  log,
  sum,
  mean,
  max_reduce,
  logsumexp,
  leaky_relu,
  softmax,
  negate,
  scale,
  gather_rows,
};

inline const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::leaf: return "leaf";
    case OpKind::matmul: return "matmul";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::div: return "div";
    case OpKind::exp: return "exp";
    case OpKind::log: return "log";
    case OpKind::sum: return "sum";
    case OpKind::mean: return "mean";
    case OpKind::max_reduce: return "max-reduce";
    case OpKind::logsumexp: return "logsumexp";
    case OpKind::leaky_relu: return "leaky-relu";
    case OpKind::softmax: return "softmax";
    case OpKind::negate: return "negate";
    case OpKind::scale: return "scale";
    case OpKind::gather_rows: return "gather-rows";
  }
  return "?";
}

/// Returns identical values detached from any tape. Gradients do not flow
/// through the result.
inline Tensor stop_gradient(const Tensor& t) { return t.detached(); }

/// Reverse-mode tape. Built per forward pass (define-by-run); single-threaded.
/// Tensors returned by ops reference nodes on this tape by index.
class Tape {
  // Broadcasting for binary elementwise ops: identical shapes, [N,C] op [C]
  // (per-row), [N,C] op [N,1] (per-column), or second operand [1] (scalar).
  // Only the second operand broadcasts.
  struct Node {
    OpKind op;
    int in0 = -1, in1 = -1;       // tape ids of inputs, -1 when constant
    std::vector<Tensor> inputs;   // saved forward values
    Tensor output;
    double attr = 0.0;            // scale factor, leaky slope, or log floor
    std::vector<int> indices;     // gather-rows
  };

 public:
  Tensor leaf(const Tensor& t) {
    Node n;
    n.op = OpKind::leaf;
    n.output = t.detached();
    return push(std::move(n));
  }

  Tensor record(OpKind op, const std::vector<Tensor>& inputs, double attr = 0.0,
                std::vector<int> indices = {}) {
    if (op == OpKind::leaf) {
      if (inputs.size() != 1) throw shape_error("leaf", {});
      return leaf(inputs[0]);
    }
    Node n;
    n.op = op;
    n.attr = attr;
    n.indices = std::move(indices);
    n.inputs.reserve(inputs.size());
    for (const auto& t : inputs) n.inputs.push_back(t.detached());
    if (!inputs.empty()) n.in0 = inputs[0].node();
    if (inputs.size() > 1) n.in1 = inputs[1].node();
    auto [shape, values] = eval(op, n.inputs, attr, n.indices);
    n.output = Tensor(std::move(shape), std::move(values));
    return push(std::move(n));
  }

  Tensor matmul(const Tensor& a, const Tensor& b) { return record(OpKind::matmul, {a, b}); }
  Tensor add(const Tensor& a, const Tensor& b) { return record(OpKind::add, {a, b}); }
  Tensor sub(const Tensor& a, const Tensor& b) { return record(OpKind::sub, {a, b}); }
  Tensor mul(const Tensor& a, const Tensor& b) { return record(OpKind::mul, {a, b}); }
  Tensor div(const Tensor& a, const Tensor& b) { return record(OpKind::div, {a, b}); }
  Tensor exp(const Tensor& a) { return record(OpKind::exp, {a}); }
  /// Natural log; floor > 0 clamps the argument from below before the log.
  Tensor log(const Tensor& a, double floor = 0.0) { return record(OpKind::log, {a}, floor); }
  Tensor sum(const Tensor& a) { return record(OpKind::sum, {a}); }
  Tensor mean(const Tensor& a) { return record(OpKind::mean, {a}); }
  Tensor max_reduce(const Tensor& a) { return record(OpKind::max_reduce, {a}); }
  Tensor logsumexp(const Tensor& a) { return record(OpKind::logsumexp, {a}); }
  Tensor leaky_relu(const Tensor& a, double slope) { return record(OpKind::leaky_relu, {a}, slope); }
  Tensor softmax(const Tensor& a) { return record(OpKind::softmax, {a}); }
  Tensor negate(const Tensor& a) { return record(OpKind::negate, {a}); }
  Tensor scale(const Tensor& a, double k) { return record(OpKind::scale, {a}, k); }
  Tensor gather_rows(const Tensor& a, std::vector<int> rows) {
    return record(OpKind::gather_rows, {a}, 0.0, std::move(rows));
  }

  /// |x| as leaky-relu with slope -1.
  Tensor abs(const Tensor& a) { return leaky_relu(a, -1.0); }

  size_t size() const { return nodes_.size(); }

  /// d(output)/d(t) for every t in wrt. Output must be a single-element tensor
  /// on this tape. Tensors without a tape node receive zero gradients.
  std::vector<Tensor> gradient(const Tensor& output, const std::vector<Tensor>& wrt) const {
    if (output.size() != 1) throw shape_error("gradient: non-scalar output", {output.shape()});
    if (!output.on_tape())
      throw error("gradient: output is a constant (no tape node)");

    std::vector<std::vector<double>> grads(nodes_.size());
    grads[static_cast<size_t>(output.node())] = {1.0};

    for (int id = output.node(); id >= 0; --id) {
      auto& g = grads[static_cast<size_t>(id)];
      if (g.empty()) continue;
      backward(nodes_[static_cast<size_t>(id)], g, grads);
      if (id != output.node() && !is_wanted(id, wrt)) {
        g.clear();            // free as we go; only requested grads are kept
        g.shrink_to_fit();
      }
    }

    std::vector<Tensor> out;
    out.reserve(wrt.size());
    for (const auto& t : wrt) {
      if (t.on_tape() && !grads[static_cast<size_t>(t.node())].empty())
        out.push_back(Tensor(t.shape(), grads[static_cast<size_t>(t.node())]));
      else
        out.push_back(Tensor::zeros(t.shape()));
    }
    return out;
  }

  /// Recomputes every node from its saved inputs and checks the recorded
  /// outputs are reproduced bit-for-bit.
  bool replay_matches() const {
    std::vector<Tensor> recomputed(nodes_.size());
    for (size_t id = 0; id < nodes_.size(); ++id) {
      const Node& n = nodes_[id];
      if (n.op == OpKind::leaf) {
        recomputed[id] = n.output;
        continue;
      }
      std::vector<Tensor> ins = n.inputs;
      if (n.in0 >= 0) ins[0] = recomputed[static_cast<size_t>(n.in0)].reshaped(ins[0].shape());
      if (n.in1 >= 0 && ins.size() > 1)
        ins[1] = recomputed[static_cast<size_t>(n.in1)].reshaped(ins[1].shape());
      auto [shape, values] = eval(n.op, ins, n.attr, n.indices);
      if (std::memcmp(values.data(), n.output.values().data(),
                      values.size() * sizeof(double)) != 0)
        return false;
      recomputed[id] = Tensor(std::move(shape), std::move(values));
    }
    return true;
  }

 private:
  std::vector<Node> nodes_;

  Tensor push(Node n) {
    Tensor out = n.output;
    out.node_ = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(n));
    return out;
  }

  static bool is_wanted(int id, const std::vector<Tensor>& wrt) {
    for (const auto& t : wrt)
      if (t.node() == id) return true;
    return false;
  }

  // --- broadcast helpers -----------------------------------------------

  enum class Bcast { same, row, col, scalar };

  static Bcast bcast_kind(OpKind op, const std::vector<int>& a, const std::vector<int>& b) {
    if (a == b) return Bcast::same;
    if (Tensor::count(b) == 1) return Bcast::scalar;
    if (a.size() == 2 && b.size() == 1 && b[0] == a[1]) return Bcast::row;
    if (a.size() == 2 && b.size() == 2 && b[0] == a[0] && b[1] == 1) return Bcast::col;
    throw shape_error(op_name(op), {a, b});
  }

  template <typename F>
  static std::vector<double> broadcast_apply(OpKind op, const Tensor& a, const Tensor& b, F f) {
    Bcast k = bcast_kind(op, a.shape(), b.shape());
    const auto& av = a.values();
    const auto& bv = b.values();
    std::vector<double> out(av.size());
    switch (k) {
      case Bcast::same:
        for (size_t i = 0; i < av.size(); ++i) out[i] = f(av[i], bv[i]);
        break;
      case Bcast::scalar:
        for (size_t i = 0; i < av.size(); ++i) out[i] = f(av[i], bv[0]);
        break;
      case Bcast::row: {
        size_t cols = static_cast<size_t>(a.dim(1));
        for (size_t i = 0; i < av.size(); ++i) out[i] = f(av[i], bv[i % cols]);
        break;
      }
      case Bcast::col: {
        size_t cols = static_cast<size_t>(a.dim(1));
        for (size_t i = 0; i < av.size(); ++i) out[i] = f(av[i], bv[i / cols]);
        break;
      }
    }
    return out;
  }

  /// Sums grad (shaped like a) down to the shape of b.
  static void reduce_into(const std::vector<double>& grad, const Tensor& a, const Tensor& b,
                          OpKind op, std::vector<double>& acc, double sign) {
    Bcast k = bcast_kind(op, a.shape(), b.shape());
    switch (k) {
      case Bcast::same:
        for (size_t i = 0; i < grad.size(); ++i) acc[i] += sign * grad[i];
        break;
      case Bcast::scalar: {
        double s = 0;
        for (double g : grad) s += g;
        acc[0] += sign * s;
        break;
      }
      case Bcast::row: {
        size_t cols = static_cast<size_t>(a.dim(1));
        for (size_t i = 0; i < grad.size(); ++i) acc[i % cols] += sign * grad[i];
        break;
      }
      case Bcast::col: {
        size_t cols = static_cast<size_t>(a.dim(1));
        for (size_t i = 0; i < grad.size(); ++i) acc[i / cols] += sign * grad[i];
        break;
      }
    }
  }

  // --- forward ------------------------------------------------------------

  static std::pair<std::vector<int>, std::vector<double>> eval(
      OpKind op, const std::vector<Tensor>& in, double attr, const std::vector<int>& idx) {
    switch (op) {
      case OpKind::leaf:
        return {in[0].shape(), in[0].values()};
      case OpKind::matmul: {
        const Tensor &a = in[0], &b = in[1];
        if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
          throw shape_error("matmul", {a.shape(), b.shape()});
        int n = a.dim(0), k = a.dim(1), m = b.dim(1);
        std::vector<double> out(static_cast<size_t>(n) * m, 0.0);
        matmul_kernel(a.values().data(), b.values().data(), out.data(), n, k, m);
        return {{n, m}, std::move(out)};
      }
      case OpKind::add:
        return {in[0].shape(), broadcast_apply(op, in[0], in[1], [](double x, double y) { return x + y; })};
      case OpKind::sub:
        return {in[0].shape(), broadcast_apply(op, in[0], in[1], [](double x, double y) { return x - y; })};
      case OpKind::mul:
        return {in[0].shape(), broadcast_apply(op, in[0], in[1], [](double x, double y) { return x * y; })};
      case OpKind::div:
        return {in[0].shape(), broadcast_apply(op, in[0], in[1], [](double x, double y) { return x / y; })};
      case OpKind::exp: {
        std::vector<double> out(in[0].values());
        for (auto& v : out) v = std::exp(v);
        return {in[0].shape(), std::move(out)};
      }
      case OpKind::log: {
        std::vector<double> out(in[0].values());
        for (auto& v : out) v = std::log(attr > 0.0 ? std::max(v, attr) : v);
        return {in[0].shape(), std::move(out)};
      }
      case OpKind::sum: {
        double s = 0;
        for (double v : in[0].values()) s += v;
        return {{1}, {s}};
      }
      case OpKind::mean: {
        double s = 0;
        for (double v : in[0].values()) s += v;
        return {{1}, {s / static_cast<double>(in[0].size())}};
      }
      case OpKind::max_reduce: {
        auto [rows, cols] = row_view(in[0]);
        std::vector<double> out(static_cast<size_t>(rows));
        const double* x = in[0].values().data();
        for (int r = 0; r < rows; ++r) {
          double m = x[static_cast<size_t>(r) * cols];
          for (int c = 1; c < cols; ++c) m = std::max(m, x[static_cast<size_t>(r) * cols + c]);
          out[static_cast<size_t>(r)] = m;
        }
        return {reduced_shape(in[0]), std::move(out)};
      }
      case OpKind::logsumexp: {
        auto [rows, cols] = row_view(in[0]);
        std::vector<double> out(static_cast<size_t>(rows));
        const double* x = in[0].values().data();
        for (int r = 0; r < rows; ++r) {
          const double* p = x + static_cast<size_t>(r) * cols;
          double m = p[0];
          for (int c = 1; c < cols; ++c) m = std::max(m, p[c]);
          double s = 0;
          for (int c = 0; c < cols; ++c) s += std::exp(p[c] - m);
          out[static_cast<size_t>(r)] = m + std::log(s);
        }
        return {reduced_shape(in[0]), std::move(out)};
      }
      case OpKind::leaky_relu: {
        std::vector<double> out(in[0].values());
        for (auto& v : out) v = v > 0 ? v : attr * v;
        return {in[0].shape(), std::move(out)};
      }
      case OpKind::softmax: {
        auto [rows, cols] = row_view(in[0]);
        std::vector<double> out(in[0].values().size());
        const double* x = in[0].values().data();
        for (int r = 0; r < rows; ++r) {
          const double* p = x + static_cast<size_t>(r) * cols;
          double* q = out.data() + static_cast<size_t>(r) * cols;
          double m = p[0];
          for (int c = 1; c < cols; ++c) m = std::max(m, p[c]);
          double s = 0;
          for (int c = 0; c < cols; ++c) {
            q[c] = std::exp(p[c] - m);
            s += q[c];
          }
          for (int c = 0; c < cols; ++c) q[c] /= s;
        }
        return {in[0].shape(), std::move(out)};
      }
      case OpKind::negate: {
        std::vector<double> out(in[0].values());
        for (auto& v : out) v = -v;
        return {in[0].shape(), std::move(out)};
      }
      case OpKind::scale: {
        std::vector<double> out(in[0].values());
        for (auto& v : out) v *= attr;
        return {in[0].shape(), std::move(out)};
      }
      case OpKind::gather_rows: {
        auto [rows, cols] = row_view(in[0]);
        std::vector<double> out(idx.size() * static_cast<size_t>(cols));
        const double* x = in[0].values().data();
        for (size_t k = 0; k < idx.size(); ++k) {
          if (idx[k] < 0 || idx[k] >= rows)
            throw error("gather-rows: index " + std::to_string(idx[k]) + " out of range [0," +
                        std::to_string(rows) + ")");
          std::memcpy(out.data() + k * static_cast<size_t>(cols),
                      x + static_cast<size_t>(idx[k]) * cols,
                      static_cast<size_t>(cols) * sizeof(double));
        }
        std::vector<int> shape = in[0].shape();
        shape[0] = static_cast<int>(idx.size());
        return {std::move(shape), std::move(out)};
      }
    }
    throw error("unreachable op");
  }

  // Treats the tensor as rows x cols with cols = last extent.
  static std::pair<int, int> row_view(const Tensor& t) {
    if (t.rank() == 0 || t.size() == 0) throw shape_error("reduce", {t.shape()});
    int cols = t.dim(t.rank() - 1);
    int rows = static_cast<int>(t.size() / cols);
    return {rows, cols};
  }

  static std::vector<int> reduced_shape(const Tensor& t) {
    std::vector<int> s(t.shape().begin(), t.shape().end() - 1);
    if (s.empty()) s = {1};
    return s;
  }

  static void matmul_kernel(const double* a, const double* b, double* out, int n, int k, int m) {
    for (int i = 0; i < n; ++i) {
      const double* arow = a + static_cast<size_t>(i) * k;
      double* orow = out + static_cast<size_t>(i) * m;
      for (int kk = 0; kk < k; ++kk) {
        double av = arow[kk];
        const double* brow = b + static_cast<size_t>(kk) * m;
        for (int j = 0; j < m; ++j) orow[j] += av * brow[j];
      }
    }
  }

  // out += a^T * g  (a: n x k, g: n x m, out: k x m)
  static void matmul_at_b(const double* a, const double* g, double* out, int n, int k, int m) {
    for (int i = 0; i < n; ++i) {
      const double* arow = a + static_cast<size_t>(i) * k;
      const double* grow = g + static_cast<size_t>(i) * m;
      for (int kk = 0; kk < k; ++kk) {
        double av = arow[kk];
        double* orow = out + static_cast<size_t>(kk) * m;
        for (int j = 0; j < m; ++j) orow[j] += av * grow[j];
      }
    }
  }

  // out += g * b^T  (g: n x m, b: k x m, out: n x k)
  static void matmul_a_bt(const double* g, const double* b, double* out, int n, int k, int m) {
    for (int i = 0; i < n; ++i) {
      const double* grow = g + static_cast<size_t>(i) * m;
      double* orow = out + static_cast<size_t>(i) * k;
      for (int kk = 0; kk < k; ++kk) {
        const double* brow = b + static_cast<size_t>(kk) * m;
        double s = 0;
        for (int j = 0; j < m; ++j) s += grow[j] * brow[j];
        orow[kk] += s;
      }
    }
  }

  // --- backward -------------------------------------------------------------

  std::vector<double>& grad_buf(std::vector<std::vector<double>>& grads, int id) const {
    auto& g = grads[static_cast<size_t>(id)];
    if (g.empty()) g.assign(static_cast<size_t>(nodes_[static_cast<size_t>(id)].output.size()), 0.0);
    return g;
  }

  void backward(const Node& n, const std::vector<double>& g,
                std::vector<std::vector<double>>& grads) const {
    switch (n.op) {
      case OpKind::leaf:
        return;
      case OpKind::matmul: {
        const Tensor &a = n.inputs[0], &b = n.inputs[1];
        int rows = a.dim(0), k = a.dim(1), m = b.dim(1);
        if (n.in0 >= 0)
          matmul_a_bt(g.data(), b.values().data(), grad_buf(grads, n.in0).data(), rows, k, m);
        if (n.in1 >= 0)
          matmul_at_b(a.values().data(), g.data(), grad_buf(grads, n.in1).data(), rows, k, m);
        return;
      }
      case OpKind::add: {
        if (n.in0 >= 0) {
          auto& acc = grad_buf(grads, n.in0);
          for (size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
        }
        if (n.in1 >= 0) reduce_into(g, n.inputs[0], n.inputs[1], n.op, grad_buf(grads, n.in1), 1.0);
        return;
      }
      case OpKind::sub: {
        if (n.in0 >= 0) {
          auto& acc = grad_buf(grads, n.in0);
          for (size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
        }
        if (n.in1 >= 0) reduce_into(g, n.inputs[0], n.inputs[1], n.op, grad_buf(grads, n.in1), -1.0);
        return;
      }
      case OpKind::mul: {
        const Tensor &a = n.inputs[0], &b = n.inputs[1];
        if (n.in0 >= 0) {
          auto gb = broadcast_apply(n.op, a, b, [](double, double y) { return y; });
          auto& acc = grad_buf(grads, n.in0);
          for (size_t i = 0; i < g.size(); ++i) acc[i] += g[i] * gb[i];
        }
        if (n.in1 >= 0) {
          std::vector<double> ga(g.size());
          for (size_t i = 0; i < g.size(); ++i) ga[i] = g[i] * a.values()[i];
          reduce_into(ga, a, b, n.op, grad_buf(grads, n.in1), 1.0);
        }
        return;
      }
      case OpKind::div: {
        const Tensor &a = n.inputs[0], &b = n.inputs[1];
        if (n.in0 >= 0) {
          auto inv = broadcast_apply(n.op, a, b, [](double, double y) { return 1.0 / y; });
          auto& acc = grad_buf(grads, n.in0);
          for (size_t i = 0; i < g.size(); ++i) acc[i] += g[i] * inv[i];
        }
        if (n.in1 >= 0) {
          auto t = broadcast_apply(n.op, a, b, [](double x, double y) { return -x / (y * y); });
          for (size_t i = 0; i < t.size(); ++i) t[i] *= g[i];
          reduce_into(t, a, b, n.op, grad_buf(grads, n.in1), 1.0);
        }
        return;
      }
      case OpKind::exp: {
        if (n.in0 < 0) return;
        auto& acc = grad_buf(grads, n.in0);
        const auto& y = n.output.values();
        for (size_t i = 0; i < g.size(); ++i) acc[i] += g[i] * y[i];
        return;
      }
      case OpKind::log: {
        if (n.in0 < 0) return;
        auto& acc = grad_buf(grads, n.in0);
        const auto& x = n.inputs[0].values();
        double floor = n.attr;
        for (size_t i = 0; i < g.size(); ++i) {
          if (floor > 0.0 && x[i] < floor) continue;  // clamped region: zero slope
          acc[i] += g[i] / x[i];
        }
        return;
      }
      case OpKind::sum: {
        if (n.in0 < 0) return;
        auto& acc = grad_buf(grads, n.in0);
        for (auto& v : acc) v += g[0];
        return;
      }
      case OpKind::mean: {
        if (n.in0 < 0) return;
        auto& acc = grad_buf(grads, n.in0);
        double s = g[0] / static_cast<double>(acc.size());
        for (auto& v : acc) v += s;
        return;
      }
      case OpKind::max_reduce: {
        if (n.in0 < 0) return;
        auto [rows, cols] = row_view(n.inputs[0]);
        auto& acc = grad_buf(grads, n.in0);
        const double* x = n.inputs[0].values().data();
        for (int r = 0; r < rows; ++r) {
          const double* p = x + static_cast<size_t>(r) * cols;
          int arg = 0;
          for (int c = 1; c < cols; ++c)
            if (p[c] > p[arg]) arg = c;
          acc[static_cast<size_t>(r) * cols + arg] += g[static_cast<size_t>(r)];
        }
        return;
      }
      case OpKind::logsumexp: {
        if (n.in0 < 0) return;
        auto [rows, cols] = row_view(n.inputs[0]);
        auto& acc = grad_buf(grads, n.in0);
        const double* x = n.inputs[0].values().data();
        const double* y = n.output.values().data();
        for (int r = 0; r < rows; ++r)
          for (int c = 0; c < cols; ++c) {
            size_t i = static_cast<size_t>(r) * cols + c;
            acc[i] += g[static_cast<size_t>(r)] * std::exp(x[i] - y[r]);
          }
        return;
      }
      case OpKind::leaky_relu: {
        if (n.in0 < 0) return;
        auto& acc = grad_buf(grads, n.in0);
        const auto& x = n.inputs[0].values();
        for (size_t i = 0; i < g.size(); ++i) acc[i] += g[i] * (x[i] > 0 ? 1.0 : n.attr);
        return;
      }
      case OpKind::softmax: {
        if (n.in0 < 0) return;
        auto [rows, cols] = row_view(n.inputs[0]);
        auto& acc = grad_buf(grads, n.in0);
        const double* y = n.output.values().data();
        for (int r = 0; r < rows; ++r) {
          const double* yr = y + static_cast<size_t>(r) * cols;
          const double* gr = g.data() + static_cast<size_t>(r) * cols;
          double dot = 0;
          for (int c = 0; c < cols; ++c) dot += gr[c] * yr[c];
          double* ar = acc.data() + static_cast<size_t>(r) * cols;
          for (int c = 0; c < cols; ++c) ar[c] += yr[c] * (gr[c] - dot);
        }
        return;
      }
      case OpKind::negate: {
        if (n.in0 < 0) return;
        auto& acc = grad_buf(grads, n.in0);
        for (size_t i = 0; i < g.size(); ++i) acc[i] -= g[i];
        return;
      }
      case OpKind::scale: {
        if (n.in0 < 0) return;
        auto& acc = grad_buf(grads, n.in0);
        for (size_t i = 0; i < g.size(); ++i) acc[i] += g[i] * n.attr;
        return;
      }
      case OpKind::gather_rows: {
        if (n.in0 < 0) return;
        auto [rows, cols] = row_view(n.inputs[0]);
        (void)rows;
        auto& acc = grad_buf(grads, n.in0);
        for (size_t k = 0; k < n.indices.size(); ++k)
          for (int c = 0; c < cols; ++c)
            acc[static_cast<size_t>(n.indices[k]) * cols + c] +=
                g[k * static_cast<size_t>(cols) + c];
        return;
      }
    }
  }
};

}  // namespace war
