#include "binet/nn/adam.hpp"

#include <cmath>

#include "binet/errors.hpp"

namespace binet::nn {

Adam::Adam(const ParameterStore& store, AdamConfig config) : config_(config) {
  for (const auto& p : store.params()) {
    m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  }
}

double Adam::step(ParameterStore& store) {
  if (store.size() != m_.size()) throw PreconditionError("Adam: parameter store changed after construction");
  const double norm = store.grad_norm();
  if (!std::isfinite(norm)) throw NumericError("Adam: non-finite gradient");
  if (config_.clip_norm > 0.0 && norm > config_.clip_norm) store.scale_grad(config_.clip_norm / norm);

  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < store.size(); ++i) {
    Parameter& p = store[i];
    if (!p.trainable) continue;
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * p.grad;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * p.grad.cwiseAbs2();
    p.value.array() -=
        config_.learning_rate * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + config_.epsilon);
  }
  return norm;
}

}  // namespace binet::nn
