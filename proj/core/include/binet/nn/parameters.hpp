#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "binet/nn/tensor.hpp"
#include "binet/random.hpp"

namespace binet::nn {

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  /// Non-trainable blocks (batch-norm running statistics) get no gradient or update.
  bool trainable = true;
};

/// Flat registry of every weight block of a model. Layers keep indices into
/// it, so the store can be optimized, checked and serialized as a whole.
class ParameterStore {
 public:
  std::size_t add(std::string name, std::size_t rows, std::size_t cols, bool trainable = true);

  Parameter& operator[](std::size_t index) { return params_[index]; }
  const Parameter& operator[](std::size_t index) const { return params_[index]; }
  Matrix& value(std::size_t index) { return params_[index].value; }
  const Matrix& value(std::size_t index) const { return params_[index].value; }
  Matrix& grad(std::size_t index) { return params_[index].grad; }

  std::size_t size() const noexcept { return params_.size(); }
  /// Number of scalar trainable weights.
  std::size_t num_trainable() const noexcept;
  void zero_grad();
  /// L2 norm over all trainable gradients.
  double grad_norm() const;
  void scale_grad(double factor);

  std::vector<Parameter>& params() noexcept { return params_; }
  const std::vector<Parameter>& params() const noexcept { return params_; }

 private:
  std::vector<Parameter> params_;
};

/// Uniform in [-s, s] with s = sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Matrix& m, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace binet::nn
