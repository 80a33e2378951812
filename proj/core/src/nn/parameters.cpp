#include "binet/nn/parameters.hpp"

#include <cmath>

namespace binet::nn {

std::size_t ParameterStore::add(std::string name, std::size_t rows, std::size_t cols, bool trainable) {
  Parameter p;
  p.name = std::move(name);
  p.value = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (trainable) p.grad = Matrix::Zero(p.value.rows(), p.value.cols());
  p.trainable = trainable;
  params_.push_back(std::move(p));
  return params_.size() - 1;
}

std::size_t ParameterStore::num_trainable() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) {
    if (p.trainable) n += static_cast<std::size_t>(p.value.size());
  }
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) {
    if (p.trainable) p.grad.setZero();
  }
}

double ParameterStore::grad_norm() const {
  double sum = 0.0;
  for (const auto& p : params_) {
    if (p.trainable) sum += p.grad.squaredNorm();
  }
  return std::sqrt(sum);
}

void ParameterStore::scale_grad(double factor) {
  for (auto& p : params_) {
    if (p.trainable) p.grad *= factor;
  }
}

void glorot_uniform(Matrix& m, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = (2.0 * uniform01(rng) - 1.0) * s;
}

}  // namespace binet::nn
