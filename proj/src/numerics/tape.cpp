// SPDX-License-Identifier: Apache-2.0

#include "report/numerics/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace report::numerics {
namespace {

template <class T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape() + " vs " + b.shape());
  }
}

template <class T>
void require_row_vector(const Tensor<T>& row, std::size_t cols, const char* op) {
  if (row.rows != 1 || row.cols != cols) {
    throw DimensionError(std::string(op) + ": expected row vector " +
                         Tensor<T>::shape_of(1, cols) + ", got " + row.shape());
  }
}

template <class T>
void axpy(T a, std::span<const T> x, std::span<T> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

template <class T>
T dot(std::span<const T> x, std::span<const T> y) {
  T s{0};
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

template <class T>
void matmul_into(const Tensor<T>& a, const Tensor<T>& b, Tensor<T>& out) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    auto orow = out.row(i);
    const auto arow = a.row(i);
    for (std::size_t p = 0; p < a.cols; ++p) axpy(arow[p], b.row(p), orow);
  }
}

// da += dc * b^T ; db += a^T * dc
template <class T>
void matmul_backward(const Tensor<T>& a, const Tensor<T>& b, const Tensor<T>& dc, Tensor<T>* da,
                     Tensor<T>* db) {
  Tensor<T> bt;
  if (da != nullptr) {
    bt = Tensor<T>(b.cols, b.rows);
    for (std::size_t p = 0; p < b.rows; ++p) {
      for (std::size_t j = 0; j < b.cols; ++j) bt(j, p) = b(p, j);
    }
  }
  for (std::size_t i = 0; i < a.rows; ++i) {
    const auto dcrow = dc.row(i);
    if (da != nullptr) {
      auto darow = da->row(i);
      for (std::size_t j = 0; j < dc.cols; ++j) axpy<T>(dcrow[j], bt.row(j), darow);
    }
    if (db != nullptr) {
      const auto arow = a.row(i);
      for (std::size_t p = 0; p < a.cols; ++p) axpy(arow[p], dcrow, db->row(p));
    }
  }
}

}  // namespace

template <class T>
T gelu_scalar(T x) {
  constexpr T c = T(0.7978845608028654);  // sqrt(2 / pi)
  return T(0.5) * x * (T(1) + std::tanh(c * (x + T(0.044715) * x * x * x)));
}

template <class T>
T gelu_grad_scalar(T x) {
  constexpr T c = T(0.7978845608028654);
  const T t = std::tanh(c * (x + T(0.044715) * x * x * x));
  return T(0.5) * (T(1) + t) +
         T(0.5) * x * (T(1) - t * t) * c * (T(1) + T(3) * T(0.044715) * x * x);
}

template <class T>
T sigmoid_scalar(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <class T>
Var Tape<T>::push(Tensor<T> value, bool needs_grad, std::function<void(Tape&)> backprop) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  if (needs_grad) n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <class T>
Var Tape<T>::constant(Tensor<T> value) {
  return push(std::move(value), false, nullptr);
}

template <class T>
Var Tape<T>::param(Parameter<T>& p) {
  const Var v = push(p.value, true, nullptr);
  nodes_[v.id].param = &p;
  return v;
}

template <class T>
Var Tape<T>::matmul(Var a, Var b) {
  const auto& A = val(a);
  const auto& B = val(b);
  if (A.cols != B.rows) {
    throw DimensionError("matmul: inner dimensions differ " + A.shape() + " x " + B.shape());
  }
  Tensor<T> out(A.rows, B.cols);
  matmul_into(A, B, out);
  const bool ng = needs(a) || needs(b);
  Var o = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[o.id].backprop = [a, b, o](Tape& t) {
      matmul_backward(t.val(a), t.val(b), t.g(o), t.needs(a) ? &t.g(a) : nullptr,
                      t.needs(b) ? &t.g(b) : nullptr);
    };
  }
  return o;
}

template <class T>
Var Tape<T>::linear(Var x, Var w, Var bias) {
  const auto& X = val(x);
  const auto& W = val(w);
  if (X.cols != W.rows) {
    throw DimensionError("linear: input " + X.shape() + " does not match weight " + W.shape());
  }
  require_row_vector(val(bias), W.cols, "linear");
  Tensor<T> out(X.rows, W.cols);
  const auto brow = val(bias).row(0);
  for (std::size_t i = 0; i < X.rows; ++i) std::copy(brow.begin(), brow.end(), out.row(i).begin());
  matmul_into(X, W, out);
  const bool ng = needs(x) || needs(w) || needs(bias);
  Var o = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[o.id].backprop = [x, w, bias, o](Tape& t) {
      const auto& dy = t.g(o);
      matmul_backward(t.val(x), t.val(w), dy, t.needs(x) ? &t.g(x) : nullptr,
                      t.needs(w) ? &t.g(w) : nullptr);
      if (t.needs(bias)) {
        auto db = t.g(bias).row(0);
        for (std::size_t i = 0; i < dy.rows; ++i) axpy(T(1), dy.row(i), db);
      }
    };
  }
  return o;
}

template <class T>
Var Tape<T>::add(Var a, Var b) {
  require_same_shape(val(a), val(b), "add");
  Tensor<T> out = val(a);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += val(b).data[i];
  const bool ng = needs(a) || needs(b);
  Var o = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[o.id].backprop = [a, b, o](Tape& t) {
      const auto& dy = t.g(o).data;
      if (t.needs(a)) axpy(T(1), std::span<const T>(dy), std::span<T>(t.g(a).data));
      if (t.needs(b)) axpy(T(1), std::span<const T>(dy), std::span<T>(t.g(b).data));
    };
  }
  return o;
}

template <class T>
Var Tape<T>::sub(Var a, Var b) {
  require_same_shape(val(a), val(b), "sub");
  Tensor<T> out = val(a);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] -= val(b).data[i];
  const bool ng = needs(a) || needs(b);
  Var o = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[o.id].backprop = [a, b, o](Tape& t) {
      const auto& dy = t.g(o).data;
      if (t.needs(a)) axpy(T(1), std::span<const T>(dy), std::span<T>(t.g(a).data));
      if (t.needs(b)) axpy(T(-1), std::span<const T>(dy), std::span<T>(t.g(b).data));
    };
  }
  return o;
}

template <class T>
Var Tape<T>::mul(Var a, Var b) {
  require_same_shape(val(a), val(b), "mul");
  Tensor<T> out = val(a);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= val(b).data[i];
  const bool ng = needs(a) || needs(b);
  Var o = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[o.id].backprop = [a, b, o](Tape& t) {
      const auto& dy = t.g(o).data;
      const auto& av = t.val(a).data;
      const auto& bv = t.val(b).data;
      if (t.needs(a)) {
        auto& da = t.g(a).data;
        for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i] * bv[i];
      }
      if (t.needs(b)) {
        auto& db = t.g(b).data;
        for (std::size_t i = 0; i < dy.size(); ++i) db[i] += dy[i] * av[i];
      }
    };
  }
  return o;
}

template <class T>
Var Tape<T>::add_row(Var a, Var row) {
  const auto& A = val(a);
  require_row_vector(val(row), A.cols, "add_row");
  Tensor<T> out = A;
  for (std::size_t i = 0; i < A.rows; ++i) axpy(T(1), val(row).row(0), out.row(i));
  const bool ng = needs(a) || needs(row);
  Var o = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[o.id].backprop = [a, row, o](Tape& t) {
      const auto& dy = t.g(o);
      if (t.needs(a)) axpy(T(1), std::span<const T>(dy.data), std::span<T>(t.g(a).data));
      if (t.needs(row)) {
        for (std::size_t i = 0; i < dy.rows; ++i) axpy(T(1), dy.row(i), t.g(row).row(0));
      }
    };
  }
  return o;
}

template <class T>
Var Tape<T>::scale(Var a, T factor) {
  Tensor<T> out = val(a);
  for (auto& x : out.data) x *= factor;
  Var o = push(std::move(out), needs(a), nullptr);
  if (needs(a)) {
    nodes_[o.id].backprop = [a, o, factor](Tape& t) {
      axpy(factor, std::span<const T>(t.g(o).data), std::span<T>(t.g(a).data));
    };
  }
  return o;
}

template <class T>
Var Tape<T>::sum(Var a) {
  Tensor<T> out(1, 1);
  for (T x : val(a).data) out.data[0] += x;
  Var o = push(std::move(out), needs(a), nullptr);
  if (needs(a)) {
    nodes_[o.id].backprop = [a, o](Tape& t) {
      const T d = t.g(o).data[0];
      for (auto& x : t.g(a).data) x += d;
    };
  }
  return o;
}

template <class T>
Var Tape<T>::gelu(Var a) {
  Tensor<T> out = val(a);
  for (auto& x : out.data) x = gelu_scalar(x);
  Var o = push(std::move(out), needs(a), nullptr);
  if (needs(a)) {
    nodes_[o.id].backprop = [a, o](Tape& t) {
      const auto& x = t.val(a).data;
      const auto& dy = t.g(o).data;
      auto& dx = t.g(a).data;
      for (std::size_t i = 0; i < x.size(); ++i) dx[i] += dy[i] * gelu_grad_scalar(x[i]);
    };
  }
  return o;
}

template <class T>
Var Tape<T>::sigmoid(Var a) {
  Tensor<T> out = val(a);
  for (auto& x : out.data) x = sigmoid_scalar(x);
  Var o = push(std::move(out), needs(a), nullptr);
  if (needs(a)) {
    nodes_[o.id].backprop = [a, o](Tape& t) {
      const auto& y = t.val(o).data;
      const auto& dy = t.g(o).data;
      auto& dx = t.g(a).data;
      for (std::size_t i = 0; i < y.size(); ++i) dx[i] += dy[i] * y[i] * (T(1) - y[i]);
    };
  }
  return o;
}

template <class T>
Var Tape<T>::softmax_rows(Var a) {
  Tensor<T> out = val(a);
  for (std::size_t i = 0; i < out.rows; ++i) {
    auto r = out.row(i);
    const T m = *std::max_element(r.begin(), r.end());
    T s{0};
    for (auto& x : r) {
      x = std::exp(x - m);
      s += x;
    }
    for (auto& x : r) x /= s;
  }
  Var o = push(std::move(out), needs(a), nullptr);
  if (needs(a)) {
    nodes_[o.id].backprop = [a, o](Tape& t) {
      const auto& y = t.val(o);
      const auto& dy = t.g(o);
      auto& dx = t.g(a);
      for (std::size_t i = 0; i < y.rows; ++i) {
        const T s = dot(dy.row(i), y.row(i));
        const auto yr = y.row(i);
        const auto dyr = dy.row(i);
        auto dxr = dx.row(i);
        for (std::size_t j = 0; j < yr.size(); ++j) dxr[j] += yr[j] * (dyr[j] - s);
      }
    };
  }
  return o;
}

template <class T>
Var Tape<T>::layer_norm(Var x, Var gamma, Var beta, T eps) {
  const auto& X = val(x);
  require_row_vector(val(gamma), X.cols, "layer_norm");
  require_row_vector(val(beta), X.cols, "layer_norm");
  const std::size_t n = X.cols;
  auto xhat = std::make_shared<Tensor<T>>(X.rows, n);
  auto inv_std = std::make_shared<std::vector<T>>(X.rows);
  Tensor<T> out(X.rows, n);
  const auto gr = val(gamma).row(0);
  const auto br = val(beta).row(0);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const auto xr = X.row(i);
    T mean{0};
    for (T v : xr) mean += v;
    mean /= T(n);
    T var{0};
    for (T v : xr) var += (v - mean) * (v - mean);
    var /= T(n);
    const T inv = T(1) / std::sqrt(var + eps);
    (*inv_std)[i] = inv;
    auto hr = xhat->row(i);
    auto orow = out.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      hr[j] = (xr[j] - mean) * inv;
      orow[j] = gr[j] * hr[j] + br[j];
    }
  }
  const bool ng = needs(x) || needs(gamma) || needs(beta);
  Var o = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[o.id].backprop = [x, gamma, beta, o, xhat, inv_std, n](Tape& t) {
      const auto& dy = t.g(o);
      const auto gr = t.val(gamma).row(0);
      std::vector<T> dxhat(n);
      for (std::size_t i = 0; i < dy.rows; ++i) {
        const auto dyr = dy.row(i);
        const auto hr = xhat->row(i);
        if (t.needs(gamma)) {
          auto dg = t.g(gamma).row(0);
          for (std::size_t j = 0; j < n; ++j) dg[j] += dyr[j] * hr[j];
        }
        if (t.needs(beta)) axpy(T(1), dyr, t.g(beta).row(0));
        if (t.needs(x)) {
          T sum_d{0};
          T sum_dh{0};
          for (std::size_t j = 0; j < n; ++j) {
            dxhat[j] = dyr[j] * gr[j];
            sum_d += dxhat[j];
            sum_dh += dxhat[j] * hr[j];
          }
          const T k = (*inv_std)[i] / T(n);
          auto dxr = t.g(x).row(i);
          for (std::size_t j = 0; j < n; ++j) {
            dxr[j] += k * (T(n) * dxhat[j] - sum_d - hr[j] * sum_dh);
          }
        }
      }
    };
  }
  return o;
}

template <class T>
Var Tape<T>::dropout(Var a, double p, bool training, Rng* rng) {
  if (p < 0.0 || p >= 1.0) throw std::invalid_argument("dropout rate must be in [0, 1)");
  if (!training || p == 0.0) return a;
  if (rng == nullptr) throw std::invalid_argument("dropout in training mode needs an rng");
  const T keep_scale = T(1) / T(1.0 - p);
  auto mask = std::make_shared<std::vector<T>>(val(a).size());
  Tensor<T> out = val(a);
  for (std::size_t i = 0; i < out.size(); ++i) {
    (*mask)[i] = uniform_real(*rng) < p ? T(0) : keep_scale;
    out.data[i] *= (*mask)[i];
  }
  Var o = push(std::move(out), needs(a), nullptr);
  if (needs(a)) {
    nodes_[o.id].backprop = [a, o, mask](Tape& t) {
      const auto& dy = t.g(o).data;
      auto& dx = t.g(a).data;
      for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i] * (*mask)[i];
    };
  }
  return o;
}

template <class T>
Var Tape<T>::embedding_lookup(Var table, std::span<const std::uint32_t> ids) {
  std::vector<RowRef> rows;
  rows.reserve(ids.size());
  for (auto id : ids) rows.push_back({table, id});
  return gather(rows);
}

template <class T>
Var Tape<T>::gather(std::span<const RowRef> rows) {
  if (rows.empty()) throw DimensionError("gather: no rows requested");
  const std::size_t width = val(rows[0].source).cols;
  Tensor<T> out(rows.size(), width);
  bool ng = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& src = val(rows[i].source);
    if (src.cols != width) {
      throw DimensionError("gather: row width " + std::to_string(src.cols) +
                           " differs from " + std::to_string(width));
    }
    if (rows[i].row >= src.rows) {
      throw DimensionError("gather: row " + std::to_string(rows[i].row) + " out of range for " +
                           src.shape());
    }
    std::copy(src.row(rows[i].row).begin(), src.row(rows[i].row).end(), out.row(i).begin());
    ng = ng || needs(rows[i].source);
  }
  Var o = push(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[o.id].backprop = [refs = std::vector<RowRef>(rows.begin(), rows.end()), o](Tape& t) {
      const auto& dy = t.g(o);
      for (std::size_t i = 0; i < refs.size(); ++i) {
        if (t.needs(refs[i].source)) axpy(T(1), dy.row(i), t.g(refs[i].source).row(refs[i].row));
      }
    };
  }
  return o;
}

template <class T>
Var Tape<T>::attention(Var q, Var k, Var v, std::span<const Segment> segments,
                       std::size_t heads) {
  const auto& Q = val(q);
  const auto& K = val(k);
  const auto& V = val(v);
  require_same_shape(Q, K, "attention");
  require_same_shape(Q, V, "attention");
  if (heads == 0 || Q.cols % heads != 0) {
    throw DimensionError("attention: width " + std::to_string(Q.cols) +
                         " not divisible by head count " + std::to_string(heads));
  }
  const std::size_t dh = Q.cols / heads;
  const T inv_sqrt = T(1) / std::sqrt(T(dh));

  auto rec = std::make_shared<AttentionRecord<T>>();
  rec->heads = heads;
  rec->segments.assign(segments.begin(), segments.end());
  std::size_t total = 0;
  for (const auto& s : segments) {
    if (s.offset + s.length > Q.rows) throw DimensionError("attention: segment out of range");
    rec->offsets.push_back(total);
    total += heads * s.length * s.length;
  }
  rec->probs.assign(total, T(0));

  Tensor<T> out(Q.rows, Q.cols);
  for (std::size_t si = 0; si < segments.size(); ++si) {
    const auto [off, n] = segments[si];
    for (std::size_t h = 0; h < heads; ++h) {
      T* P = rec->probs.data() + rec->offsets[si] + h * n * n;
      const std::size_t c0 = h * dh;
      for (std::size_t i = 0; i < n; ++i) {
        const std::span<const T> qi = Q.row(off + i).subspan(c0, dh);
        T* Pi = P + i * n;
        T m = -std::numeric_limits<T>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
          Pi[j] = dot(qi, K.row(off + j).subspan(c0, dh)) * inv_sqrt;
          m = std::max(m, Pi[j]);
        }
        T s{0};
        for (std::size_t j = 0; j < n; ++j) {
          Pi[j] = std::exp(Pi[j] - m);
          s += Pi[j];
        }
        auto oi = out.row(off + i).subspan(c0, dh);
        for (std::size_t j = 0; j < n; ++j) {
          Pi[j] /= s;
          axpy(Pi[j], V.row(off + j).subspan(c0, dh), oi);
        }
      }
    }
  }

  const bool ng = needs(q) || needs(k) || needs(v);
  Var o = push(std::move(out), ng, nullptr);
  nodes_[o.id].attention = rec;
  if (ng) {
    nodes_[o.id].backprop = [q, k, v, o, rec, dh, inv_sqrt](Tape& t) {
      const auto& Q = t.val(q);
      const auto& K = t.val(k);
      const auto& V = t.val(v);
      const auto& dO = t.g(o);
      Tensor<T>* dQ = t.needs(q) ? &t.g(q) : nullptr;
      Tensor<T>* dK = t.needs(k) ? &t.g(k) : nullptr;
      Tensor<T>* dV = t.needs(v) ? &t.g(v) : nullptr;
      std::vector<T> dP;
      for (std::size_t si = 0; si < rec->segments.size(); ++si) {
        const auto [off, n] = rec->segments[si];
        dP.resize(n);
        for (std::size_t h = 0; h < rec->heads; ++h) {
          const T* P = rec->probs.data() + rec->offsets[si] + h * n * n;
          const std::size_t c0 = h * dh;
          for (std::size_t i = 0; i < n; ++i) {
            const T* Pi = P + i * n;
            const auto doi = dO.row(off + i).subspan(c0, dh);
            T s{0};
            for (std::size_t j = 0; j < n; ++j) {
              dP[j] = dot(doi, V.row(off + j).subspan(c0, dh));
              s += dP[j] * Pi[j];
              if (dV != nullptr) axpy(Pi[j], doi, dV->row(off + j).subspan(c0, dh));
            }
            for (std::size_t j = 0; j < n; ++j) {
              const T ds = Pi[j] * (dP[j] - s) * inv_sqrt;
              if (dQ != nullptr) axpy(ds, K.row(off + j).subspan(c0, dh), dQ->row(off + i).subspan(c0, dh));
              if (dK != nullptr) axpy(ds, Q.row(off + i).subspan(c0, dh), dK->row(off + j).subspan(c0, dh));
            }
          }
        }
      }
    };
  }
  return o;
}

template <class T>
Var Tape<T>::bce(Var scores, std::span<const int> labels) {
  const auto& S = val(scores);
  if (S.cols != 1 || S.rows != labels.size()) {
    throw DimensionError("bce: scores " + S.shape() + " vs " + std::to_string(labels.size()) +
                         " labels");
  }
  constexpr T lo = T(1e-7);
  constexpr T hi = T(1) - T(1e-7);
  Tensor<T> out(1, 1);
  for (std::size_t i = 0; i < S.rows; ++i) {
    const T s = std::clamp(S.data[i], lo, hi);
    out.data[0] -= labels[i] != 0 ? std::log(s) : std::log(T(1) - s);
  }
  Var o = push(std::move(out), needs(scores), nullptr);
  if (needs(scores)) {
    nodes_[o.id].backprop = [scores, o, y = std::vector<int>(labels.begin(), labels.end())](
                                Tape& t) {
      const T d = t.g(o).data[0];
      const auto& S = t.val(scores).data;
      auto& dS = t.g(scores).data;
      for (std::size_t i = 0; i < S.size(); ++i) {
        const T s = S[i];
        if (s < lo || s > hi) continue;
        dS[i] += d * (y[i] != 0 ? -T(1) / s : T(1) / (T(1) - s));
      }
    };
  }
  return o;
}

template <class T>
const AttentionRecord<T>& Tape<T>::attention_record(Var v) const {
  const auto& rec = nodes_.at(v.id).attention;
  if (!rec) throw std::invalid_argument("variable is not an attention output");
  return *rec;
}

template <class T>
const AttentionRecord<T>* Tape<T>::find_attention_record(Var v) const {
  return nodes_.at(v.id).attention.get();
}

template <class T>
void Tape<T>::backward(Var loss) {
  const auto& L = nodes_.at(loss.id).value;
  if (L.rows != 1 || L.cols != 1) {
    throw std::invalid_argument("backward: loss must be a scalar, got " + L.shape());
  }
  for (std::size_t i = 0; i <= loss.id; ++i) {
    auto& n = nodes_[i];
    if (n.needs_grad) n.grad = Tensor<T>(n.value.rows, n.value.cols);
  }
  if (nodes_[loss.id].needs_grad) {
    nodes_[loss.id].grad.data[0] = T(1);
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      auto& n = nodes_[i];
      if (!n.needs_grad) continue;
      if (n.param != nullptr) {
        axpy(T(1), std::span<const T>(n.grad.data), std::span<T>(n.param->grad.data));
      } else if (n.backprop) {
        n.backprop(*this);
      }
    }
  }
  nodes_.clear();
}

template class Tape<float>;
template class Tape<double>;
template float gelu_scalar<float>(float);
template double gelu_scalar<double>(double);
template float gelu_grad_scalar<float>(float);
template double gelu_grad_scalar<double>(double);
template float sigmoid_scalar<float>(float);
template double sigmoid_scalar<double>(double);

}  // namespace report::numerics
