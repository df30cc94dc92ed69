// SPDX-License-Identifier: Apache-2.0
//
// Dense row-major matrices and named trainable parameters. Every tensor in the
// model is two-dimensional; vectors are 1 x n rows.

#ifndef REPORT_NUMERICS_TENSOR_HPP
#define REPORT_NUMERICS_TENSOR_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace report::numerics {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <class T>
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c, T fill = T{0}) : rows(r), cols(c), data(r * c, fill) {}
  Tensor(std::size_t r, std::size_t c, std::vector<T> values)
      : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != r * c) {
      throw DimensionError("tensor data length " + std::to_string(data.size()) +
                           " does not match shape " + shape_of(r, c));
    }
  }

  std::size_t size() const { return data.size(); }
  T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<T> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const T> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  std::string shape() const { return shape_of(rows, cols); }

  static std::string shape_of(std::size_t r, std::size_t c) {
    return "[" + std::to_string(r) + "x" + std::to_string(c) + "]";
  }

  template <class U>
  Tensor<U> cast() const {
    Tensor<U> out(rows, cols);
    std::transform(data.begin(), data.end(), out.data.begin(),
                   [](T v) { return static_cast<U>(v); });
    return out;
  }
};

template <class T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter(std::string n, Tensor<T> v)
      : name(std::move(n)), value(std::move(v)), grad(value.rows, value.cols) {}
};

/// Owns a model's parameters in registration order. Addresses are stable.
template <class T>
class ParameterStore {
 public:
  Parameter<T>& add(const std::string& name, std::size_t rows, std::size_t cols) {
    if (index_.contains(name)) throw std::invalid_argument("duplicate parameter name: " + name);
    index_.emplace(name, params_.size());
    params_.push_back(std::make_unique<Parameter<T>>(name, Tensor<T>(rows, cols)));
    return *params_.back();
  }

  std::size_t size() const { return params_.size(); }
  Parameter<T>& operator[](std::size_t i) { return *params_[i]; }
  const Parameter<T>& operator[](std::size_t i) const { return *params_[i]; }

  Parameter<T>* find(const std::string& name) {
    const auto it = index_.find(name);
    return it == index_.end() ? nullptr : params_[it->second].get();
  }
  const Parameter<T>* find(const std::string& name) const {
    const auto it = index_.find(name);
    return it == index_.end() ? nullptr : params_[it->second].get();
  }

  void zero_grad() {
    for (auto& p : params_) p->grad.fill(T{0});
  }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p->value.size();
    return n;
  }

 private:
  std::vector<std::unique_ptr<Parameter<T>>> params_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace report::numerics

#endif  // REPORT_NUMERICS_TENSOR_HPP
