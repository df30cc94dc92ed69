// SPDX-License-Identifier: Apache-2.0

#include "report/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace report::numerics {
namespace {

double evaluate(const LossBuilder& loss) {
  Tape<double> tape;
  const Var v = loss(tape);
  const auto& t = tape.value(v);
  if (t.rows != 1 || t.cols != 1) throw std::invalid_argument("loss must be scalar");
  return t.data[0];
}

}  // namespace

GradCheckResult finite_diff_check(const LossBuilder& loss, ParameterStore<double>& params,
                                  double eps, std::size_t max_coords_per_param,
                                  std::uint64_t seed) {
  params.zero_grad();
  {
    Tape<double> tape;
    tape.backward(loss(tape));
  }

  GradCheckResult result;
  Rng rng = make_rng(seed, "gradcheck");
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto& p = params[pi];
    std::vector<std::size_t> coords(p.value.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (coords.size() > max_coords_per_param) {
      shuffle(coords.begin(), coords.end(), rng);
      coords.resize(max_coords_per_param);
    }
    for (const std::size_t c : coords) {
      const double saved = p.value.data[c];
      p.value.data[c] = saved + eps;
      const double up = evaluate(loss);
      p.value.data[c] = saved - eps;
      const double down = evaluate(loss);
      p.value.data[c] = saved;

      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = p.grad.data[c];
      // Cancellation in up - down alone can be this large.
      const double noise = 8.0 * std::numeric_limits<double>::epsilon() *
                           std::max({std::abs(up), std::abs(down), 1.0}) / eps;
      const double diff = std::abs(analytic - numeric);
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      const double rel = diff <= noise ? 0.0 : diff / denom;
      ++result.coordinates_checked;
      if (rel > result.max_relative_error || result.worst_parameter.empty()) {
        result.max_relative_error = std::max(rel, result.max_relative_error);
        result.worst_parameter = p.name;
        result.worst_index = c;
        result.worst_analytic = analytic;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace report::numerics
