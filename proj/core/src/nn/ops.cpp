#include "binet/nn/ops.hpp"

#include <cmath>

#include "binet/errors.hpp"

namespace binet::nn {

Vector softmax(const Vector& logits) {
  if (logits.size() == 0) throw PreconditionError("softmax of an empty vector");
  if (!logits.allFinite()) throw NumericError("softmax: non-finite logits");
  Vector e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

Matrix softmax_rows(const Matrix& logits) {
  if (!logits.allFinite()) throw NumericError("softmax: non-finite logits");
  Matrix out = (logits.colwise() - logits.rowwise().maxCoeff()).array().exp();
  out.array().colwise() /= out.rowwise().sum().array();
  return out;
}

double cross_entropy(const Vector& p, std::int32_t target, ClipCounter* counter) {
  if (target == 0) return 0.0;
  if (target < 0 || target >= p.size()) throw PreconditionError("cross_entropy: target out of range");
  double q = p[target];
  if (q < kProbabilityFloor) {
    q = kProbabilityFloor;
    if (counter) ++counter->clipped;
  }
  return -std::log(q);
}

void softmax_cross_entropy(const Matrix& logits, std::span<const std::int32_t> targets, double scale,
                           Matrix& probs, Matrix& grad_logits, LossAndGrad& acc, ClipCounter* counter) {
  if (static_cast<std::size_t>(logits.rows()) != targets.size()) {
    throw PreconditionError("softmax_cross_entropy: one target per row required");
  }
  probs = softmax_rows(logits);
  grad_logits = probs * scale;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const std::int32_t t = targets[static_cast<std::size_t>(i)];
    if (t == 0) {
      grad_logits.row(i).setZero();
      continue;
    }
    if (t < 0 || t >= logits.cols()) throw PreconditionError("softmax_cross_entropy: target out of range");
    double q = probs(i, t);
    if (q < kProbabilityFloor) {
      q = kProbabilityFloor;
      if (counter) ++counter->clipped;
    }
    acc.loss_sum -= std::log(q);
    ++acc.count;
    grad_logits(i, t) -= scale;
  }
}

}  // namespace binet::nn
