#pragma once

#include <cstddef>
#include <vector>

#include "binet/nn/parameters.hpp"

namespace binet::nn {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Gradients are rescaled when their global L2 norm exceeds this; <= 0 disables clipping.
  double clip_norm = 5.0;
};

/// Bias-corrected Adam over every trainable block of a store.
class Adam {
 public:
  Adam() = default;
  Adam(const ParameterStore& store, AdamConfig config = {});

  /// Clips, then applies one update from the gradients currently in `store`.
  /// Throws NumericError on non-finite gradients. Returns the pre-clip norm.
  double step(ParameterStore& store);

  std::size_t steps() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  AdamConfig config_;
  std::size_t t_ = 0;
  std::vector<Matrix> m_, v_;
};

}  // namespace binet::nn
