#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "binet/event_log.hpp"
#include "binet/nn/adam.hpp"
#include "binet/nn/layers.hpp"
#include "binet/nn/ops.hpp"
#include "binet/nn/parameters.hpp"
#include "binet/scores.hpp"

namespace binet {

enum class BinetVersion : std::uint32_t { V1 = 1, V2 = 2, V3 = 3 };

std::string_view to_string(BinetVersion v);
/// Accepts "v1", "v2", "v3" (or "1".."3").
BinetVersion binet_version_from_string(std::string_view name);

struct BinetConfig {
  BinetVersion version = BinetVersion::V1;
  /// GRU width; 0 selects 2 * (E - 1), i.e. twice the longest case.
  std::size_t hidden_dim = 0;
  std::size_t batch_size = 500;
  std::size_t epochs = 20;
  std::uint64_t seed = 0;
  nn::AdamConfig adam = {};
  /// After training, replace the running batch-norm statistics by exact
  /// statistics over the training log.
  bool recalibrate_batchnorm = true;
};

struct TrainingHistory {
  /// Mean batch loss (sum over heads of masked mean cross-entropy) per epoch.
  std::vector<double> epoch_loss;
  std::size_t updates = 0;
  std::size_t clipped_probabilities = 0;
};

/// Sequence-to-sequence next-event model with one encoder GRU per attribute
/// and one decoder GRU + softmax head per attribute.
///
/// Decoder inputs: v1 sees the concatenated encoder outputs only; v2 adds the
/// embedded next activity to every non-activity head; v3 gives each head the
/// embedded next-event attributes except its own target.
class BinetModel {
 public:
  BinetModel() = default;

  /// Throws PreconditionError for empty or mismatched schema/vocabularies.
  static BinetModel build(std::vector<std::string> schema, std::vector<Vocabulary> vocabularies,
                          std::size_t max_length, BinetConfig config);
  /// Builds against the dictionaries and E of an encoded log.
  static BinetModel build(const EncodedLog& encoded, BinetConfig config);

  /// Teacher-forced training on every case of `encoded`, whose dictionaries
  /// must equal the model's. Case order is reshuffled each epoch.
  TrainingHistory train(const EncodedLog& encoded);

  /// Next-event distributions after `prefix` (may be empty: BOS only), one per
  /// attribute. v2/v3 need the next event's attributes as inputs; v1 ignores `next`.
  std::vector<nn::Vector> predict(const std::vector<Event>& prefix, const std::optional<Event>& next = {}) const;

  /// S[i, j, k] = sigma(p, p[observed]) for every event of every case.
  /// Optionally keeps every softmax output in `distributions`.
  ScoreTensor score(const EncodedLog& encoded, Distributions* distributions = nullptr, std::size_t threads = 1) const;
  /// Encodes `log` with the model's dictionaries, then scores it.
  ScoreTensor score(const EventLog& log, Distributions* distributions = nullptr, std::size_t threads = 1) const;

  /// Loss over the given cases with batch-norm in training mode (running
  /// statistics untouched). With `with_grad`, gradients are zeroed and filled.
  double batch_loss(const EncodedLog& encoded, std::span<const std::size_t> cases, bool with_grad);

  /// Sets the batch-norm running statistics to the exact statistics of `encoded`.
  void recalibrate_batchnorm(const EncodedLog& encoded);

  const BinetConfig& config() const noexcept { return config_; }
  BinetVersion version() const noexcept { return config_.version; }
  const std::vector<std::string>& schema() const noexcept { return schema_; }
  const std::vector<Vocabulary>& vocabularies() const noexcept { return vocabularies_; }
  std::size_t max_length() const noexcept { return max_length_; }
  std::size_t hidden_dim() const noexcept { return hidden_; }
  std::size_t num_attributes() const noexcept { return schema_.size(); }
  std::size_t embedding_dim(std::size_t attribute) const { return embeddings_[attribute].dim(); }
  /// Attributes of the next event that head `head` receives as input.
  const std::vector<std::size_t>& next_inputs(std::size_t head) const { return next_inputs_[head]; }
  std::size_t decoder_input_dim(std::size_t head) const { return decoders_[head].input_dim(); }

  nn::ParameterStore& parameters() noexcept { return store_; }
  const nn::ParameterStore& parameters() const noexcept { return store_; }

  /// Default embedding width: ceil(sqrt(|V| + 2)), at least 2.
  static std::size_t default_embedding_dim(std::size_t vocabulary_size);

 private:
  struct Batch;
  struct Forward;

  void wire();
  Batch make_batch(const EncodedLog& encoded, std::span<const std::size_t> cases) const;
  /// mode: 0 inference, 1 training (update running stats), 2 training (frozen stats)
  void forward(const Batch& batch, int mode, Forward& f);
  void forward_inference(const Batch& batch, Forward& f) const;
  double loss_and_backward(const Batch& batch, Forward& f, bool with_grad, nn::ClipCounter* clip);
  void check_dictionaries(const EncodedLog& encoded) const;

  BinetConfig config_;
  std::vector<std::string> schema_;
  std::vector<Vocabulary> vocabularies_;
  std::size_t max_length_ = 0;
  std::size_t hidden_ = 0;

  nn::ParameterStore store_;
  std::vector<nn::Embedding> embeddings_;
  std::vector<nn::GruCell> encoders_;
  std::vector<nn::BatchNorm> encoder_norms_;
  std::vector<nn::GruCell> decoders_;
  std::vector<nn::BatchNorm> decoder_norms_;
  std::vector<nn::Dense> heads_;
  std::vector<std::vector<std::size_t>> next_inputs_;

  friend void save_model(const BinetModel&, const std::filesystem::path&);
  friend std::string serialize_model(const BinetModel&);
  friend BinetModel deserialize_model(std::string_view);
};

/// Model container: magic "BINETMDL", format version, header (BINet version,
/// dims, seed, training config), schema, dictionaries, embedding widths and
/// every parameter block as little-endian 64-bit floats.
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string serialize_model(const BinetModel& model);
/// Throws FormatError for a wrong magic, unsupported version or inconsistent layout.
BinetModel deserialize_model(std::string_view bytes);
void save_model(const BinetModel& model, const std::filesystem::path& path);
BinetModel load_model(const std::filesystem::path& path);

}  // namespace binet
