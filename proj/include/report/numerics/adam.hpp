// SPDX-License-Identifier: Apache-2.0

#ifndef REPORT_NUMERICS_ADAM_HPP
#define REPORT_NUMERICS_ADAM_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "report/numerics/tensor.hpp"

namespace report::numerics {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <class T>
struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<Tensor<T>> first;
  std::vector<Tensor<T>> second;

  AdamState() = default;
  AdamState(const ParameterStore<T>& params, AdamConfig cfg) : config(cfg) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      first.emplace_back(params[i].value.rows, params[i].value.cols);
      second.emplace_back(params[i].value.rows, params[i].value.cols);
    }
  }
};

/// Bias-corrected Adam update using each parameter's accumulated gradient.
template <class T>
void adam_step(ParameterStore<T>& params, AdamState<T>& state) {
  if (state.first.size() != params.size()) {
    throw std::invalid_argument("adam_step: optimizer state tracks " +
                                std::to_string(state.first.size()) + " parameters, model has " +
                                std::to_string(params.size()));
  }
  ++state.step;
  const auto& c = state.config;
  const double corr1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double corr2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    if (!p.grad.same_shape(p.value) || !state.first[i].same_shape(p.value)) {
      throw std::invalid_argument("adam_step: missing or misshaped gradient for " + p.name);
    }
    auto& m = state.first[i].data;
    auto& v = state.second[i].data;
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = static_cast<double>(p.grad.data[j]);
      m[j] = static_cast<T>(c.beta1 * m[j] + (1.0 - c.beta1) * g);
      v[j] = static_cast<T>(c.beta2 * v[j] + (1.0 - c.beta2) * g * g);
      const double mhat = m[j] / corr1;
      const double vhat = v[j] / corr2;
      p.value.data[j] -= static_cast<T>(c.lr * mhat / (std::sqrt(vhat) + c.eps));
    }
  }
}

}  // namespace report::numerics

#endif  // REPORT_NUMERICS_ADAM_HPP
