#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "binet/nn/parameters.hpp"
#include "binet/nn/tensor.hpp"

namespace binet::nn {

/// Lookup table from integer symbols to dense rows.
class Embedding {
 public:
  Embedding() = default;
  Embedding(ParameterStore& store, const std::string& name, std::size_t vocab, std::size_t dim);

  Matrix forward(const ParameterStore& store, std::span<const std::int32_t> indices) const;
  void backward(ParameterStore& store, std::span<const std::int32_t> indices, const Matrix& grad) const;

  std::size_t vocab() const noexcept { return vocab_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t table() const noexcept { return table_; }

 private:
  std::size_t table_ = 0;
  std::size_t vocab_ = 0;
  std::size_t dim_ = 0;
};

/// Gated recurrent unit. The gate blocks are stored side by side:
/// W is input x 3H, U is H x 3H and b is 1 x 3H, in the order (z | r | h).
///
///   z  = sigmoid(x Wz + h Uz + bz)
///   r  = sigmoid(x Wr + h Ur + br)
///   h~ = tanh(x Wh + (r * h) Uh + bh)
///   h' = (1 - z) * h + z * h~
class GruCell {
 public:
  GruCell() = default;
  GruCell(ParameterStore& store, const std::string& name, std::size_t input_dim, std::size_t hidden_dim);

  std::size_t input_dim() const noexcept { return input_; }
  std::size_t hidden_dim() const noexcept { return hidden_; }
  std::size_t W() const noexcept { return w_; }
  std::size_t U() const noexcept { return u_; }
  std::size_t b() const noexcept { return b_; }

  struct Cache {
    Sequence x, h_prev, z, r, candidate;
  };

  /// Runs the cell over a sequence starting from h = 0. inputs[t] holds the
  /// rows active at t (non-increasing). Output t has the same rows as inputs[t].
  Sequence forward(const ParameterStore& store, const Sequence& inputs, Cache* cache = nullptr) const;
  /// Backpropagation through time. Accumulates parameter gradients and returns
  /// the gradient with respect to every input.
  Sequence backward(ParameterStore& store, const Cache& cache, const Sequence& grad_outputs) const;

 private:
  std::size_t w_ = 0, u_ = 0, b_ = 0;
  std::size_t input_ = 0, hidden_ = 0;
};

/// One step of `cell` for a single example.
Vector gru_step(const ParameterStore& store, const GruCell& cell, const Vector& x, const Vector& h_prev);

/// Normalizes every feature over all rows of all timesteps. Running statistics
/// are blended as running = momentum * running + (1 - momentum) * batch.
class BatchNorm {
 public:
  BatchNorm() = default;
  BatchNorm(ParameterStore& store, const std::string& name, std::size_t features, double momentum = 0.99,
            double epsilon = 1e-5);

  struct Cache {
    Sequence normalized;
    RowVector inv_std;
    std::size_t rows = 0;
  };

  /// Training mode uses the batch statistics (and updates the running ones when
  /// `update_running`); inference mode uses the running statistics.
  Sequence forward(ParameterStore& store, const Sequence& x, bool training, Cache* cache = nullptr,
                   bool update_running = true) const;
  Sequence forward_inference(const ParameterStore& store, const Sequence& x) const;
  Sequence backward(ParameterStore& store, const Cache& cache, const Sequence& grad) const;

  std::size_t gamma() const noexcept { return gamma_; }
  std::size_t beta() const noexcept { return beta_; }
  std::size_t running_mean() const noexcept { return mean_; }
  std::size_t running_var() const noexcept { return var_; }
  double epsilon() const noexcept { return epsilon_; }

 private:
  std::size_t gamma_ = 0, beta_ = 0, mean_ = 0, var_ = 0;
  std::size_t features_ = 0;
  double momentum_ = 0.99;
  double epsilon_ = 1e-5;
};

/// Affine layer y = x W + b.
class Dense {
 public:
  Dense() = default;
  Dense(ParameterStore& store, const std::string& name, std::size_t input_dim, std::size_t output_dim);

  Matrix forward(const ParameterStore& store, const Matrix& x) const;
  /// Accumulates dW, db and returns dx.
  Matrix backward(ParameterStore& store, const Matrix& x, const Matrix& grad) const;

  std::size_t W() const noexcept { return w_; }
  std::size_t b() const noexcept { return b_; }
  std::size_t output_dim() const noexcept { return out_; }

 private:
  std::size_t w_ = 0, b_ = 0;
  std::size_t in_ = 0, out_ = 0;
};

/// Initializes every block whose name ends in ".W", ".U" or ".table" with
/// glorot_uniform (fan-in = rows, fan-out = columns) and leaves the rest as constructed.
void initialize(ParameterStore& store, Rng& rng);

}  // namespace binet::nn
