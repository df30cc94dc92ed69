// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode automatic differentiation over 2-D tensors.
//
// A Tape records every operation applied to its variables. backward() walks
// the record in reverse, accumulating gradients into the tape's nodes and,
// for parameter leaves, into Parameter::grad. Gradients accumulate across
// backward calls; callers zero them between optimizer steps.
//
// Sequences of different lengths are packed row-wise into one matrix and
// described by Segments. Row-wise operations (linear layers, layer norm,
// activations) ignore segment boundaries; attention only mixes rows inside
// the same segment, which is equivalent to padding plus a key mask.

#ifndef REPORT_NUMERICS_TAPE_HPP
#define REPORT_NUMERICS_TAPE_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "report/numerics/tensor.hpp"
#include "report/rng.hpp"

namespace report::numerics {

struct Var {
  std::uint32_t id = 0;
};

struct Segment {
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct RowRef {
  Var source;
  std::size_t row = 0;
};

/// Attention probabilities kept by an attention node, per segment and head.
template <class T>
struct AttentionRecord {
  std::size_t heads = 0;
  std::vector<Segment> segments;
  std::vector<std::size_t> offsets;  // start of segment s, head 0 in probs
  std::vector<T> probs;

  /// Row-major length x length matrix: weights(s, h)[i * length + j] is the
  /// weight position i puts on position j.
  std::span<const T> weights(std::size_t segment, std::size_t head) const {
    const auto n = segments.at(segment).length;
    return {probs.data() + offsets[segment] + head * n * n, n * n};
  }
};

template <class T>
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor<T> value);
  /// Leaf bound to a parameter. The parameter must outlive backward().
  Var param(Parameter<T>& p);

  const Tensor<T>& value(Var v) const { return nodes_.at(v.id).value; }
  std::size_t node_count() const { return nodes_.size(); }

  // a[m x k] * b[k x n]
  Var matmul(Var a, Var b);
  // x[m x k] * w[k x n] + bias[1 x n]
  Var linear(Var x, Var w, Var bias);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  // a[m x n] + row[1 x n], broadcast over rows
  Var add_row(Var a, Var row);
  Var scale(Var a, T factor);
  Var sum(Var a);
  Var gelu(Var a);
  Var sigmoid(Var a);
  Var softmax_rows(Var a);
  /// Per-row normalization to zero mean / unit variance, then gamma * x + beta.
  Var layer_norm(Var x, Var gamma, Var beta, T eps = T(1e-5));
  /// Inverted dropout. With training == false the input is returned as is.
  Var dropout(Var a, double p, bool training, Rng* rng);
  /// Output row i is table row ids[i].
  Var embedding_lookup(Var table, std::span<const std::uint32_t> ids);
  /// Output row i is rows[i].source row rows[i].row. All sources share a width.
  Var gather(std::span<const RowRef> rows);
  /// Scaled dot-product attention over packed segments. q, k, v are
  /// [N x d] with d divisible by heads; returns the concatenated head outputs.
  Var attention(Var q, Var k, Var v, std::span<const Segment> segments, std::size_t heads);
  /// Summed binary cross-entropy of scores[m x 1] against labels, with scores
  /// clamped to [1e-7, 1 - 1e-7].
  Var bce(Var scores, std::span<const int> labels);

  const AttentionRecord<T>& attention_record(Var v) const;
  /// nullptr unless `v` is an attention output.
  const AttentionRecord<T>* find_attention_record(Var v) const;

  /// Requires a 1x1 loss. Propagates d(loss) = 1 back to every parameter
  /// leaf, then clears the tape.
  void backward(Var loss);

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    std::function<void(Tape&)> backprop;
    Parameter<T>* param = nullptr;
    bool needs_grad = false;
    std::shared_ptr<AttentionRecord<T>> attention;
  };

  Var push(Tensor<T> value, bool needs_grad, std::function<void(Tape&)> backprop);
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }
  Tensor<T>& g(Var v) { return nodes_[v.id].grad; }
  const Tensor<T>& val(Var v) const { return nodes_[v.id].value; }

  std::vector<Node> nodes_;
};

extern template class Tape<float>;
extern template class Tape<double>;

/// Scalar reference functions shared by the tape ops and their tests.
template <class T>
T gelu_scalar(T x);
template <class T>
T gelu_grad_scalar(T x);
template <class T>
T sigmoid_scalar(T x);

}  // namespace report::numerics

#endif  // REPORT_NUMERICS_TAPE_HPP
