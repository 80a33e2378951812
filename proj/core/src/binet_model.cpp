#include "binet/binet_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "binet/errors.hpp"
#include "binet/random.hpp"
#include "binet/thresholding.hpp"

namespace binet {

using nn::Matrix;
using nn::Sequence;

std::string_view to_string(BinetVersion v) {
  switch (v) {
    case BinetVersion::V1: return "v1";
    case BinetVersion::V2: return "v2";
    case BinetVersion::V3: return "v3";
  }
  return "?";
}

BinetVersion binet_version_from_string(std::string_view name) {
  if (name == "v1" || name == "1" || name == "binetv1") return BinetVersion::V1;
  if (name == "v2" || name == "2" || name == "binetv2") return BinetVersion::V2;
  if (name == "v3" || name == "3" || name == "binetv3") return BinetVersion::V3;
  throw ParseError("unknown BINet version '" + std::string(name) + "'");
}

struct BinetModel::Batch {
  /// Case indices sorted by decreasing length.
  std::vector<std::size_t> cases;
  /// Active rows per timestep; timestep t predicts event t (0-based) from events < t.
  std::vector<std::size_t> active;
  std::size_t rows = 0;
  /// [attribute][timestep][row]: encoded input event t and target event t + 1 of F.
  std::vector<std::vector<std::vector<std::int32_t>>> inputs, targets;
};

struct BinetModel::Forward {
  std::vector<nn::GruCell::Cache> encoder_cache, decoder_cache;
  std::vector<nn::BatchNorm::Cache> encoder_bn, decoder_bn;
  std::vector<Sequence> decoder_out;  // per head: batch-norm output feeding the dense layer
  std::vector<Sequence> logits;       // per head
  // Recalibration: pre-normalization GRU outputs are summed here when enabled.
  bool collect_encoder = false, collect_decoder = false;
  std::vector<nn::RowVector> sum, sum_sq;
  std::size_t collected_rows = 0;
};

std::size_t BinetModel::default_embedding_dim(std::size_t vocabulary_size) {
  const auto d = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(vocabulary_size + 2))));
  return std::max<std::size_t>(d, 2);
}

BinetModel BinetModel::build(std::vector<std::string> schema, std::vector<Vocabulary> vocabularies,
                             std::size_t max_length, BinetConfig config) {
  if (schema.empty() || schema.size() != vocabularies.size()) {
    throw PreconditionError("BINet: schema and dictionaries must be non-empty and of equal length");
  }
  for (const auto& v : vocabularies) {
    if (v.size() == 0) throw PreconditionError("BINet: empty dictionary");
  }
  if (max_length < 2) throw PreconditionError("BINet: E must be at least 2");
  if (config.batch_size == 0) throw PreconditionError("BINet: batch size must be >= 1");
  BinetModel m;
  m.config_ = config;
  m.schema_ = std::move(schema);
  m.vocabularies_ = std::move(vocabularies);
  m.max_length_ = max_length;
  m.hidden_ = config.hidden_dim ? config.hidden_dim : 2 * (max_length - 1);
  m.config_.hidden_dim = m.hidden_;
  m.wire();
  Rng rng(mix_seed(config.seed));
  nn::initialize(m.store_, rng);
  return m;
}

BinetModel BinetModel::build(const EncodedLog& encoded, BinetConfig config) {
  return build(encoded.schema, encoded.vocabularies, encoded.max_length, config);
}

void BinetModel::wire() {
  const std::size_t A = schema_.size();
  const std::size_t H = hidden_;
  next_inputs_.assign(A, {});
  for (std::size_t h = 0; h < A; ++h) {
    for (std::size_t b = 0; b < A; ++b) {
      const bool wanted = config_.version == BinetVersion::V3   ? b != h
                          : config_.version == BinetVersion::V2 ? (h != 0 && b == 0)
                                                                : false;
      if (wanted) next_inputs_[h].push_back(b);
    }
  }
  for (std::size_t a = 0; a < A; ++a) {
    const std::size_t V = vocabularies_[a].dimension();
    embeddings_.emplace_back(store_, "embedding." + schema_[a], V, default_embedding_dim(vocabularies_[a].size()));
  }
  for (std::size_t a = 0; a < A; ++a) {
    encoders_.emplace_back(store_, "encoder." + schema_[a], embeddings_[a].dim(), H);
    encoder_norms_.emplace_back(store_, "encoder_bn." + schema_[a], H);
  }
  for (std::size_t h = 0; h < A; ++h) {
    std::size_t width = A * H;
    for (std::size_t b : next_inputs_[h]) width += embeddings_[b].dim();
    decoders_.emplace_back(store_, "decoder." + schema_[h], width, H);
    decoder_norms_.emplace_back(store_, "decoder_bn." + schema_[h], H);
    heads_.emplace_back(store_, "head." + schema_[h], H, vocabularies_[h].dimension());
  }
}

void BinetModel::check_dictionaries(const EncodedLog& encoded) const {
  if (encoded.schema != schema_ || encoded.vocabularies != vocabularies_) {
    throw PreconditionError("encoded log dictionaries differ from the model's; encode with the model dictionaries");
  }
}

BinetModel::Batch BinetModel::make_batch(const EncodedLog& enc, std::span<const std::size_t> cases) const {
  Batch b;
  b.cases.assign(cases.begin(), cases.end());
  std::stable_sort(b.cases.begin(), b.cases.end(),
                   [&](std::size_t x, std::size_t y) { return enc.case_lengths[x] > enc.case_lengths[y]; });
  const std::size_t T = b.cases.empty() ? 0 : enc.case_lengths[b.cases.front()];
  const std::size_t A = schema_.size();
  for (std::size_t t = 0; t < T; ++t) {
    std::size_t n = 0;
    while (n < b.cases.size() && enc.case_lengths[b.cases[n]] > t) ++n;
    b.active.push_back(n);
    b.rows += n;
  }
  b.inputs.assign(A, std::vector<std::vector<std::int32_t>>(T));
  b.targets.assign(A, std::vector<std::vector<std::int32_t>>(T));
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t t = 0; t < T; ++t) {
      auto& in = b.inputs[a][t];
      auto& out = b.targets[a][t];
      in.reserve(b.active[t]);
      out.reserve(b.active[t]);
      for (std::size_t r = 0; r < b.active[t]; ++r) {
        in.push_back(enc.at(b.cases[r], t, a));
        out.push_back(enc.at(b.cases[r], t + 1, a));
      }
    }
  }
  return b;
}

namespace {

void accumulate(const Sequence& seq, nn::RowVector& sum, nn::RowVector& sum_sq) {
  for (const auto& m : seq) {
    sum += m.colwise().sum();
    sum_sq += m.array().square().colwise().sum().matrix();
  }
}

}  // namespace

void BinetModel::forward(const Batch& batch, int mode, Forward& f) {
  const bool training = mode != 0;
  const std::size_t A = schema_.size();
  const auto H = static_cast<Eigen::Index>(hidden_);
  const std::size_t T = batch.active.size();
  f.encoder_cache.resize(A);
  f.encoder_bn.resize(A);
  f.decoder_cache.resize(A);
  f.decoder_bn.resize(A);
  f.decoder_out.assign(A, {});
  f.logits.assign(A, {});

  Sequence concat(T);
  for (std::size_t t = 0; t < T; ++t) concat[t].resize(static_cast<Eigen::Index>(batch.active[t]), A * H);
  for (std::size_t a = 0; a < A; ++a) {
    Sequence x(T);
    for (std::size_t t = 0; t < T; ++t) x[t] = embeddings_[a].forward(store_, batch.inputs[a][t]);
    const Sequence h = encoders_[a].forward(store_, x, training ? &f.encoder_cache[a] : nullptr);
    if (f.collect_encoder) accumulate(h, f.sum[a], f.sum_sq[a]);
    const Sequence normed = training ? encoder_norms_[a].forward(store_, h, true, &f.encoder_bn[a], mode == 1)
                                     : encoder_norms_[a].forward_inference(store_, h);
    for (std::size_t t = 0; t < T; ++t) concat[t].middleCols(static_cast<Eigen::Index>(a) * H, H) = normed[t];
  }
  for (std::size_t head = 0; head < A; ++head) {
    Sequence x(T);
    for (std::size_t t = 0; t < T; ++t) {
      if (next_inputs_[head].empty()) {
        x[t] = concat[t];
        continue;
      }
      x[t].resize(concat[t].rows(), static_cast<Eigen::Index>(decoders_[head].input_dim()));
      x[t].leftCols(A * H) = concat[t];
      Eigen::Index offset = A * H;
      for (std::size_t b : next_inputs_[head]) {
        const auto d = static_cast<Eigen::Index>(embeddings_[b].dim());
        x[t].middleCols(offset, d) = embeddings_[b].forward(store_, batch.targets[b][t]);
        offset += d;
      }
    }
    const Sequence h = decoders_[head].forward(store_, x, training ? &f.decoder_cache[head] : nullptr);
    if (f.collect_decoder) accumulate(h, f.sum[head], f.sum_sq[head]);
    Sequence normed = training ? decoder_norms_[head].forward(store_, h, true, &f.decoder_bn[head], mode == 1)
                               : decoder_norms_[head].forward_inference(store_, h);
    f.logits[head].reserve(T);
    for (std::size_t t = 0; t < T; ++t) f.logits[head].push_back(heads_[head].forward(store_, normed[t]));
    f.decoder_out[head] = std::move(normed);
  }
}

void BinetModel::forward_inference(const Batch& batch, Forward& f) const {
  // Mode 0 only reads the parameter store, so concurrent calls are safe.
  const_cast<BinetModel*>(this)->forward(batch, 0, f);
}

double BinetModel::loss_and_backward(const Batch& batch, Forward& f, bool with_grad, nn::ClipCounter* clip) {
  const std::size_t A = schema_.size();
  const auto H = static_cast<Eigen::Index>(hidden_);
  const std::size_t T = batch.active.size();
  const double scale = 1.0 / static_cast<double>(batch.rows);
  if (with_grad) store_.zero_grad();

  double loss = 0.0;
  Sequence d_concat(T);
  for (std::size_t t = 0; t < T; ++t) d_concat[t] = Matrix::Zero(static_cast<Eigen::Index>(batch.active[t]), A * H);

  for (std::size_t head = 0; head < A; ++head) {
    nn::LossAndGrad acc;
    Sequence d_out(T);
    Matrix probs, grad;
    for (std::size_t t = 0; t < T; ++t) {
      nn::softmax_cross_entropy(f.logits[head][t], batch.targets[head][t], scale, probs, grad, acc, clip);
      if (with_grad) d_out[t] = heads_[head].backward(store_, f.decoder_out[head][t], grad);
    }
    loss += acc.loss_sum * scale;
    if (!with_grad) continue;
    const Sequence d_h = decoder_norms_[head].backward(store_, f.decoder_bn[head], d_out);
    const Sequence d_x = decoders_[head].backward(store_, f.decoder_cache[head], d_h);
    for (std::size_t t = 0; t < T; ++t) {
      d_concat[t] += d_x[t].leftCols(A * H);
      Eigen::Index offset = A * H;
      for (std::size_t b : next_inputs_[head]) {
        const auto d = static_cast<Eigen::Index>(embeddings_[b].dim());
        embeddings_[b].backward(store_, batch.targets[b][t], d_x[t].middleCols(offset, d));
        offset += d;
      }
    }
  }
  if (!with_grad) return loss;
  for (std::size_t a = 0; a < A; ++a) {
    Sequence d_normed(T);
    for (std::size_t t = 0; t < T; ++t) d_normed[t] = d_concat[t].middleCols(static_cast<Eigen::Index>(a) * H, H);
    const Sequence d_h = encoder_norms_[a].backward(store_, f.encoder_bn[a], d_normed);
    const Sequence d_x = encoders_[a].backward(store_, f.encoder_cache[a], d_h);
    for (std::size_t t = 0; t < T; ++t) embeddings_[a].backward(store_, batch.inputs[a][t], d_x[t]);
  }
  return loss;
}

double BinetModel::batch_loss(const EncodedLog& encoded, std::span<const std::size_t> cases, bool with_grad) {
  check_dictionaries(encoded);
  const Batch batch = make_batch(encoded, cases);
  if (batch.rows == 0) throw PreconditionError("batch_loss: no events");
  Forward f;
  forward(batch, 2, f);
  return loss_and_backward(batch, f, with_grad, nullptr);
}

TrainingHistory BinetModel::train(const EncodedLog& encoded) {
  check_dictionaries(encoded);
  if (encoded.num_cases == 0) throw PreconditionError("train: empty log");
  TrainingHistory history;
  nn::Adam adam(store_, config_.adam);
  nn::ClipCounter clip;
  std::vector<std::size_t> order(encoded.num_cases);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(config_.seed ^ 0x9e3779b97f4a7c15ULL));
  const std::size_t B = config_.batch_size;
  for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += B) {
      const std::size_t end = std::min(order.size(), begin + B);
      const Batch batch = make_batch(encoded, std::span<const std::size_t>(order).subspan(begin, end - begin));
      Forward f;
      forward(batch, 1, f);
      total += loss_and_backward(batch, f, true, &clip);
      adam.step(store_);
      ++batches;
    }
    history.epoch_loss.push_back(total / static_cast<double>(batches));
  }
  history.updates = adam.steps();
  history.clipped_probabilities = clip.clipped;
  if (config_.recalibrate_batchnorm) recalibrate_batchnorm(encoded);
  return history;
}

void BinetModel::recalibrate_batchnorm(const EncodedLog& encoded) {
  check_dictionaries(encoded);
  const std::size_t A = schema_.size();
  const auto H = static_cast<Eigen::Index>(hidden_);
  std::vector<std::size_t> all(encoded.num_cases);
  std::iota(all.begin(), all.end(), 0);
  const std::size_t B = std::max<std::size_t>(config_.batch_size, 1);

  // Encoders first: decoder inputs depend on the normalized encoder outputs.
  for (int stage = 0; stage < 2; ++stage) {
    Forward f;
    f.collect_encoder = stage == 0;
    f.collect_decoder = stage == 1;
    f.sum.assign(A, nn::RowVector::Zero(H));
    f.sum_sq.assign(A, nn::RowVector::Zero(H));
    std::size_t rows = 0;
    for (std::size_t begin = 0; begin < all.size(); begin += B) {
      const std::size_t end = std::min(all.size(), begin + B);
      const Batch batch = make_batch(encoded, std::span<const std::size_t>(all).subspan(begin, end - begin));
      forward(batch, 0, f);
      rows += batch.rows;
    }
    if (rows == 0) return;
    const double n = static_cast<double>(rows);
    for (std::size_t a = 0; a < A; ++a) {
      const nn::RowVector mean = f.sum[a] / n;
      const nn::RowVector var = (f.sum_sq[a] / n - mean.cwiseAbs2()).cwiseMax(0.0);
      const nn::BatchNorm& bn = stage == 0 ? encoder_norms_[a] : decoder_norms_[a];
      store_.value(bn.running_mean()) = mean;
      store_.value(bn.running_var()) = var;
    }
  }
}

std::vector<nn::Vector> BinetModel::predict(const std::vector<Event>& prefix, const std::optional<Event>& next) const {
  if (config_.version != BinetVersion::V1 && !next) {
    throw PreconditionError("BINet " + std::string(to_string(config_.version)) + " needs the next event as input");
  }
  const std::size_t A = schema_.size();
  const std::size_t T = prefix.size() + 1;
  auto encode_event = [&](const Event& e, std::size_t a) -> std::int32_t {
    if (e.attributes.size() + 1 != A) throw SchemaError("predict: event does not match the model schema");
    return vocabularies_[a].index_of(EventLog::value(e, a));
  };
  Batch b;
  b.cases = {0};
  b.active.assign(T, 1);
  b.rows = T;
  b.inputs.assign(A, std::vector<std::vector<std::int32_t>>(T));
  b.targets.assign(A, std::vector<std::vector<std::int32_t>>(T));
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t t = 0; t < T; ++t) {
      b.inputs[a][t] = {t == 0 ? kBeginOfCaseIndex : encode_event(prefix[t - 1], a)};
      std::int32_t target = kPaddingIndex;
      if (t + 1 < T) {
        target = encode_event(prefix[t], a);
      } else if (next && config_.version != BinetVersion::V1) {
        // The head's own value never reaches it; only attributes some head reads must be known.
        bool read = false;
        for (std::size_t h = 0; h < A; ++h) {
          read = read || std::find(next_inputs_[h].begin(), next_inputs_[h].end(), a) != next_inputs_[h].end();
        }
        if (read) target = encode_event(*next, a);
      }
      b.targets[a][t] = {target};
    }
  }
  Forward f;
  forward_inference(b, f);
  std::vector<nn::Vector> result;
  for (std::size_t h = 0; h < A; ++h) result.push_back(nn::softmax(f.logits[h][T - 1].row(0).transpose()));
  return result;
}

ScoreTensor BinetModel::score(const EncodedLog& encoded, Distributions* distributions, std::size_t threads) const {
  check_dictionaries(encoded);
  const std::size_t A = schema_.size();
  const std::size_t E = encoded.max_length > 0 ? encoded.max_length - 1 : 0;
  ScoreTensor scores(encoded.case_lengths, E, A, 0.0);
  if (distributions) {
    std::vector<std::size_t> dims;
    for (const auto& v : vocabularies_) dims.push_back(v.dimension());
    *distributions = Distributions(encoded.case_lengths, dims);
  }
  std::vector<std::size_t> all(encoded.num_cases);
  std::iota(all.begin(), all.end(), 0);
  const std::size_t B = std::max<std::size_t>(config_.batch_size, 1);
  const std::size_t num_batches = (all.size() + B - 1) / B;

  auto work = [&](std::size_t first_batch, std::size_t stride) {
    for (std::size_t nb = first_batch; nb < num_batches; nb += stride) {
      const std::size_t begin = nb * B, end = std::min(all.size(), begin + B);
      const Batch batch = make_batch(encoded, std::span<const std::size_t>(all).subspan(begin, end - begin));
      Forward f;
      forward_inference(batch, f);
      for (std::size_t h = 0; h < A; ++h) {
        for (std::size_t t = 0; t < batch.active.size(); ++t) {
          const Matrix probs = nn::softmax_rows(f.logits[h][t]);
          for (std::size_t r = 0; r < batch.active[t]; ++r) {
            const std::span<const double> p(probs.row(static_cast<Eigen::Index>(r)).data(),
                                            static_cast<std::size_t>(probs.cols()));
            const std::size_t i = batch.cases[r];
            scores(i, t, h) = sigma_unchecked(p, p[static_cast<std::size_t>(batch.targets[h][t][r])]);
            if (distributions) std::copy(p.begin(), p.end(), distributions->at(i, t, h).begin());
          }
        }
      }
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, num_batches));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
    for (auto& th : pool) th.join();
  }
  return scores;
}

ScoreTensor BinetModel::score(const EventLog& log, Distributions* distributions, std::size_t threads) const {
  return score(encode(log, vocabularies_), distributions, threads);
}

}  // namespace binet
