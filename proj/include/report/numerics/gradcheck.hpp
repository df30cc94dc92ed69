// SPDX-License-Identifier: Apache-2.0
//
// Central finite-difference verification of tape gradients (64-bit only).

#ifndef REPORT_NUMERICS_GRADCHECK_HPP
#define REPORT_NUMERICS_GRADCHECK_HPP

#include <functional>
#include <string>

#include "report/numerics/tape.hpp"

namespace report::numerics {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates_checked = 0;
};

/// Builds the scalar loss on the given tape. Must be a pure function of the
/// parameter values.
using LossBuilder = std::function<Var(Tape<double>&)>;

/// Compares backward() against (f(w + eps) - f(w - eps)) / 2 eps on up to
/// `max_coords_per_param` randomly chosen coordinates of each parameter.
/// Relative error is |a - n| / max(|a|, |n|, 1e-6), taken as zero when
/// |a - n| is within the roundoff of the difference quotient itself.
GradCheckResult finite_diff_check(const LossBuilder& loss, ParameterStore<double>& params,
                                  double eps = 1e-5, std::size_t max_coords_per_param = 200,
                                  std::uint64_t seed = 0);

}  // namespace report::numerics

#endif  // REPORT_NUMERICS_GRADCHECK_HPP
