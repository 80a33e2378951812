#include "binet/nn/layers.hpp"

#include <cmath>

#include "binet/errors.hpp"

namespace binet::nn {

namespace {

using Eigen::Index;

Index idx(std::size_t n) { return static_cast<Index>(n); }

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Matrix sigmoid(const Matrix& a) { return (1.0 + (-a.array()).exp()).inverse().matrix(); }

}  // namespace

// ---------------------------------------------------------------------------

Embedding::Embedding(ParameterStore& store, const std::string& name, std::size_t vocab, std::size_t dim)
    : table_(store.add(name + ".table", vocab, dim)), vocab_(vocab), dim_(dim) {}

Matrix Embedding::forward(const ParameterStore& store, std::span<const std::int32_t> indices) const {
  const Matrix& table = store.value(table_);
  Matrix out(idx(indices.size()), idx(dim_));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || static_cast<std::size_t>(indices[i]) >= vocab_) {
      throw PreconditionError("embedding index out of range");
    }
    out.row(idx(i)) = table.row(indices[i]);
  }
  return out;
}

void Embedding::backward(ParameterStore& store, std::span<const std::int32_t> indices, const Matrix& grad) const {
  Matrix& g = store.grad(table_);
  for (std::size_t i = 0; i < indices.size(); ++i) g.row(indices[i]) += grad.row(idx(i));
}

// ---------------------------------------------------------------------------

GruCell::GruCell(ParameterStore& store, const std::string& name, std::size_t input_dim, std::size_t hidden_dim)
    : w_(store.add(name + ".W", input_dim, 3 * hidden_dim)),
      u_(store.add(name + ".U", hidden_dim, 3 * hidden_dim)),
      b_(store.add(name + ".b", 1, 3 * hidden_dim)),
      input_(input_dim),
      hidden_(hidden_dim) {}

Sequence GruCell::forward(const ParameterStore& store, const Sequence& inputs, Cache* cache) const {
  const Index H = idx(hidden_);
  const Matrix& W = store.value(w_);
  const Matrix& U = store.value(u_);
  const RowVector b = store.value(b_).row(0);
  Sequence outputs;
  outputs.reserve(inputs.size());
  if (cache) *cache = Cache{};
  if (inputs.empty()) return outputs;

  Matrix h = Matrix::Zero(inputs[0].rows(), H);
  for (const Matrix& x : inputs) {
    const Index n = x.rows();
    if (n > h.rows()) throw PreconditionError("GRU: active rows must not increase over time");
    if (x.cols() != idx(input_)) throw PreconditionError("GRU: input width mismatch");
    Matrix hp = h.topRows(n);
    Matrix a = x * W;
    a.rowwise() += b;
    a.leftCols(2 * H).noalias() += hp * U.leftCols(2 * H);
    Matrix z = sigmoid(a.leftCols(H));
    Matrix r = sigmoid(a.middleCols(H, H));
    Matrix rh = r.cwiseProduct(hp);
    Matrix c = a.rightCols(H);
    c.noalias() += rh * U.rightCols(H);
    c = c.array().tanh().matrix();
    h = hp + z.cwiseProduct(c - hp);
    outputs.push_back(h);
    if (cache) {
      cache->x.push_back(x);
      cache->h_prev.push_back(std::move(hp));
      cache->z.push_back(std::move(z));
      cache->r.push_back(std::move(r));
      cache->candidate.push_back(std::move(c));
    }
  }
  return outputs;
}

Sequence GruCell::backward(ParameterStore& store, const Cache& cache, const Sequence& grad_outputs) const {
  const Index H = idx(hidden_);
  const Matrix& W = store.value(w_);
  const Matrix& U = store.value(u_);
  Matrix& dW = store.grad(w_);
  Matrix& dU = store.grad(u_);
  Matrix& db = store.grad(b_);
  const std::size_t T = grad_outputs.size();
  Sequence dx(T);
  if (T == 0) return dx;

  Matrix dh_next = Matrix::Zero(grad_outputs[T - 1].rows(), H);
  for (std::size_t t = T; t-- > 0;) {
    const Matrix& z = cache.z[t];
    const Matrix& r = cache.r[t];
    const Matrix& c = cache.candidate[t];
    const Matrix& hp = cache.h_prev[t];
    const Index n = z.rows();

    const Matrix dh = grad_outputs[t] + dh_next;
    Matrix da(n, 3 * H);
    da.rightCols(H) = (dh.cwiseProduct(z).array() * (1.0 - c.array().square())).matrix();
    da.leftCols(H) = (dh.cwiseProduct(c - hp).array() * z.array() * (1.0 - z.array())).matrix();
    const Matrix drh = da.rightCols(H) * U.rightCols(H).transpose();
    da.middleCols(H, H) = (drh.cwiseProduct(hp).array() * r.array() * (1.0 - r.array())).matrix();

    Matrix dhp = (dh.array() * (1.0 - z.array())).matrix() + drh.cwiseProduct(r);
    dhp.noalias() += da.leftCols(2 * H) * U.leftCols(2 * H).transpose();

    dW.noalias() += cache.x[t].transpose() * da;
    db += da.colwise().sum();
    dU.leftCols(2 * H).noalias() += hp.transpose() * da.leftCols(2 * H);
    dU.rightCols(H).noalias() += r.cwiseProduct(hp).transpose() * da.rightCols(H);
    dx[t] = da * W.transpose();

    if (t > 0) {
      dh_next = Matrix::Zero(grad_outputs[t - 1].rows(), H);
      dh_next.topRows(n) = dhp;
    }
  }
  return dx;
}

Vector gru_step(const ParameterStore& store, const GruCell& cell, const Vector& x, const Vector& h_prev) {
  if (static_cast<std::size_t>(x.size()) != cell.input_dim() ||
      static_cast<std::size_t>(h_prev.size()) != cell.hidden_dim()) {
    throw PreconditionError("gru_step: dimension mismatch");
  }
  const Index H = idx(cell.hidden_dim());
  const Matrix& W = store.value(cell.W());
  const Matrix& U = store.value(cell.U());
  const Matrix& b = store.value(cell.b());
  const Vector a = W.transpose() * x + b.row(0).transpose();
  const Vector z = sigmoid(a.head(H) + U.leftCols(H).transpose() * h_prev);
  const Vector r = sigmoid(a.segment(H, H) + U.middleCols(H, H).transpose() * h_prev);
  const Vector c = (a.tail(H) + U.rightCols(H).transpose() * r.cwiseProduct(h_prev)).array().tanh().matrix();
  return h_prev + z.cwiseProduct(c - h_prev);
}

// ---------------------------------------------------------------------------

BatchNorm::BatchNorm(ParameterStore& store, const std::string& name, std::size_t features, double momentum,
                     double epsilon)
    : gamma_(store.add(name + ".gamma", 1, features)),
      beta_(store.add(name + ".beta", 1, features)),
      mean_(store.add(name + ".running_mean", 1, features, false)),
      var_(store.add(name + ".running_var", 1, features, false)),
      features_(features),
      momentum_(momentum),
      epsilon_(epsilon) {
  store.value(gamma_).setOnes();
  store.value(var_).setOnes();
}

Sequence BatchNorm::forward(ParameterStore& store, const Sequence& x, bool training, Cache* cache,
                            bool update_running) const {
  if (!training) return forward_inference(store, x);
  const Index F = idx(features_);
  std::size_t rows = 0;
  RowVector sum = RowVector::Zero(F);
  for (const auto& m : x) {
    rows += static_cast<std::size_t>(m.rows());
    sum += m.colwise().sum();
  }
  if (rows == 0) throw PreconditionError("batch norm over an empty batch");
  const double N = static_cast<double>(rows);
  const RowVector mean = sum / N;
  RowVector var = RowVector::Zero(F);
  for (const auto& m : x) var += (m.rowwise() - mean).array().square().colwise().sum().matrix();
  var /= N;
  const RowVector inv_std = (var.array() + epsilon_).rsqrt().matrix();
  const RowVector gamma = store.value(gamma_).row(0);
  const RowVector beta = store.value(beta_).row(0);

  Sequence out;
  out.reserve(x.size());
  if (cache) {
    cache->normalized.clear();
    cache->inv_std = inv_std;
    cache->rows = rows;
  }
  for (const auto& m : x) {
    Matrix normalized = ((m.rowwise() - mean).array().rowwise() * inv_std.array()).matrix();
    Matrix y = (normalized.array().rowwise() * gamma.array()).matrix();
    y.rowwise() += beta;
    out.push_back(std::move(y));
    if (cache) cache->normalized.push_back(std::move(normalized));
  }
  if (update_running) {
    store.value(mean_) = momentum_ * store.value(mean_) + (1.0 - momentum_) * mean;
    store.value(var_) = momentum_ * store.value(var_) + (1.0 - momentum_) * var;
  }
  return out;
}

Sequence BatchNorm::forward_inference(const ParameterStore& store, const Sequence& x) const {
  const RowVector mean = store.value(mean_).row(0);
  const RowVector scale =
      (store.value(gamma_).row(0).array() * (store.value(var_).row(0).array() + epsilon_).rsqrt()).matrix();
  const RowVector beta = store.value(beta_).row(0);
  Sequence out;
  out.reserve(x.size());
  for (const auto& m : x) {
    Matrix y = ((m.rowwise() - mean).array().rowwise() * scale.array()).matrix();
    y.rowwise() += beta;
    out.push_back(std::move(y));
  }
  return out;
}

Sequence BatchNorm::backward(ParameterStore& store, const Cache& cache, const Sequence& grad) const {
  const Index F = idx(features_);
  const RowVector gamma = store.value(gamma_).row(0);
  RowVector sum_g = RowVector::Zero(F);
  RowVector sum_gx = RowVector::Zero(F);
  for (std::size_t t = 0; t < grad.size(); ++t) {
    sum_g += grad[t].colwise().sum();
    sum_gx += grad[t].cwiseProduct(cache.normalized[t]).colwise().sum();
  }
  store.grad(gamma_) += sum_gx;
  store.grad(beta_) += sum_g;
  const double N = static_cast<double>(cache.rows);
  const RowVector factor = (gamma.array() * cache.inv_std.array() / N).matrix();
  Sequence dx;
  dx.reserve(grad.size());
  for (std::size_t t = 0; t < grad.size(); ++t) {
    Matrix d = N * grad[t];
    d.rowwise() -= sum_g;
    d -= (cache.normalized[t].array().rowwise() * sum_gx.array()).matrix();
    d = (d.array().rowwise() * factor.array()).matrix();
    dx.push_back(std::move(d));
  }
  return dx;
}

// ---------------------------------------------------------------------------

Dense::Dense(ParameterStore& store, const std::string& name, std::size_t input_dim, std::size_t output_dim)
    : w_(store.add(name + ".W", input_dim, output_dim)),
      b_(store.add(name + ".b", 1, output_dim)),
      in_(input_dim),
      out_(output_dim) {}

Matrix Dense::forward(const ParameterStore& store, const Matrix& x) const {
  if (x.cols() != idx(in_)) throw PreconditionError("dense: input width mismatch");
  Matrix y = x * store.value(w_);
  y.rowwise() += store.value(b_).row(0);
  return y;
}

Matrix Dense::backward(ParameterStore& store, const Matrix& x, const Matrix& grad) const {
  store.grad(w_).noalias() += x.transpose() * grad;
  store.grad(b_) += grad.colwise().sum();
  return grad * store.value(w_).transpose();
}

void initialize(ParameterStore& store, Rng& rng) {
  for (auto& p : store.params()) {
    if (ends_with(p.name, ".W") || ends_with(p.name, ".U") || ends_with(p.name, ".table")) {
      glorot_uniform(p.value, static_cast<std::size_t>(p.value.rows()), static_cast<std::size_t>(p.value.cols()),
                     rng);
    }
  }
}

}  // namespace binet::nn
