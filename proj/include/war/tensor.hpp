#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <vector>

#include "war/error.hpp"

namespace war {

/// Dense multi-dimensional array of doubles. Values are immutable and shared
/// between copies; a tensor optionally carries the id of the tape node that
/// produced it (node() < 0 for constants).
class Tensor {
 public:
  Tensor() = default;

  Tensor(std::vector<int> shape, std::vector<double> values)
      : shape_(std::move(shape)),
        values_(std::make_shared<const std::vector<double>>(std::move(values))) {
    if (static_cast<int64_t>(values_->size()) != count(shape_))
      throw shape_error("tensor", {shape_, {static_cast<int>(values_->size())}});
  }

  static Tensor scalar(double v) { return Tensor({1}, {v}); }

  static Tensor zeros(std::vector<int> shape) {
    auto n = count(shape);
    return Tensor(std::move(shape), std::vector<double>(static_cast<size_t>(n), 0.0));
  }

  static Tensor full(std::vector<int> shape, double v) {
    auto n = count(shape);
    return Tensor(std::move(shape), std::vector<double>(static_cast<size_t>(n), v));
  }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int64_t size() const { return count(shape_); }
  bool empty() const { return !values_; }

  const std::vector<double>& values() const { return *values_; }
  double operator[](int64_t i) const { return (*values_)[static_cast<size_t>(i)]; }

  double item() const {
    if (size() != 1) throw shape_error("item", {shape_});
    return (*values_)[0];
  }

  bool on_tape() const { return node_ >= 0; }
  int node() const { return node_; }

  /// Same values and tape node, different shape. Metadata only: gradients
  /// accumulate per node, so element count must be preserved.
  Tensor reshaped(std::vector<int> new_shape) const {
    if (count(new_shape) != size()) throw shape_error("reshape", {shape_, new_shape});
    Tensor t = *this;
    t.shape_ = std::move(new_shape);
    return t;
  }

  /// Identical values, detached from any tape.
  Tensor detached() const {
    Tensor t = *this;
    t.node_ = -1;
    return t;
  }

  static int64_t count(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int d : shape) {
      if (d < 0) throw shape_error("tensor", {shape});
      n *= d;
    }
    return n;
  }

 private:
  std::vector<int> shape_;
  std::shared_ptr<const std::vector<double>> values_;
  int node_ = -1;

  friend class Tape;
};

}  // namespace war
