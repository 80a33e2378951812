#include "binet/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace binet::nn {

GradCheckResult grad_check(ParameterStore& store, const std::function<double()>& loss_and_grad,
                           const std::function<double()>& loss, double step, double floor) {
  loss_and_grad();
  std::vector<Matrix> analytic;
  for (const auto& p : store.params()) analytic.push_back(p.trainable ? p.grad : Matrix());

  GradCheckResult result;
  for (std::size_t i = 0; i < store.size(); ++i) {
    Parameter& p = store[i];
    if (!p.trainable) continue;
    for (Eigen::Index k = 0; k < p.value.size(); ++k) {
      double& w = p.value.data()[k];
      const double saved = w;
      w = saved + step;
      const double up = loss();
      w = saved - step;
      const double down = loss();
      w = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[i].data()[k];
      const double abs_error = std::abs(a - numeric);
      const double rel_error = abs_error / std::max({std::abs(a), std::abs(numeric), floor});
      if (rel_error > result.max_relative_error) {
        result.max_relative_error = rel_error;
        result.worst_parameter = p.name + "[" + std::to_string(k) + "]";
      }
      result.max_absolute_error = std::max(result.max_absolute_error, abs_error);
      ++result.checked;
    }
  }
  return result;
}

}  // namespace binet::nn
