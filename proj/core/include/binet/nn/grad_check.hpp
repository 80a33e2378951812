#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "binet/nn/parameters.hpp"

namespace binet::nn {

struct GradCheckResult {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::string worst_parameter;
  std::size_t checked = 0;
};

/// Compares analytic gradients with central finite differences on every
/// trainable scalar of `store`.
///
/// `loss_and_grad` must zero and fill the gradients of `store` and return the
/// loss; `loss` must return the same loss without side effects on the values.
/// The relative error is |a - n| / max(|a|, |n|, floor).
GradCheckResult grad_check(ParameterStore& store, const std::function<double()>& loss_and_grad,
                           const std::function<double()>& loss, double step = 1e-5, double floor = 1e-6);

}  // namespace binet::nn
