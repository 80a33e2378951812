#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

#include "binet/nn/tensor.hpp"

namespace binet::nn {

/// Probabilities are clipped to this value before taking the log.
inline constexpr double kProbabilityFloor = 1e-12;

/// Numerically stable softmax (max-subtracted). Throws NumericError on NaN input.
Vector softmax(const Vector& logits);
/// Row-wise softmax.
Matrix softmax_rows(const Matrix& logits);

/// Counts how often cross_entropy had to clip a probability.
struct ClipCounter {
  std::size_t clipped = 0;
};

/// -log p[target]; target 0 (padding) contributes 0.
double cross_entropy(const Vector& p, std::int32_t target, ClipCounter* counter = nullptr);

struct LossAndGrad {
  double loss_sum = 0.0;
  std::size_t count = 0;
};

/// Softmax followed by cross-entropy for a batch of rows. Adds the summed loss
/// over non-padding targets to `acc` and writes d(loss_sum * scale)/d(logits)
/// into `grad_logits` (zero rows for padding targets). `probs` receives the softmax.
void softmax_cross_entropy(const Matrix& logits, std::span<const std::int32_t> targets, double scale,
                           Matrix& probs, Matrix& grad_logits, LossAndGrad& acc, ClipCounter* counter = nullptr);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace binet::nn
