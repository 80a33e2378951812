#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "binet/event_log.hpp"

namespace binet {

/// Dense C x E' x A tensor over the event slots of a log (E' = longest case,
/// no BOS slot). Slot (i, j, k) is padding when j >= case_lengths[i].
template <class T>
class SlotTensor {
 public:
  SlotTensor() = default;
  SlotTensor(std::vector<std::size_t> case_lengths, std::size_t max_events, std::size_t attributes, T fill = T{})
      : lengths_(std::move(case_lengths)),
        events_(max_events),
        attributes_(attributes),
        data_(lengths_.size() * max_events * attributes, fill) {}

  std::size_t num_cases() const noexcept { return lengths_.size(); }
  std::size_t max_events() const noexcept { return events_; }
  std::size_t num_attributes() const noexcept { return attributes_; }
  const std::vector<std::size_t>& case_lengths() const noexcept { return lengths_; }
  std::size_t case_length(std::size_t i) const { return lengths_[i]; }
  bool is_padding(std::size_t i, std::size_t j) const { return j >= lengths_[i]; }
  /// Number of non-padding events.
  std::size_t num_events() const noexcept {
    std::size_t n = 0;
    for (std::size_t l : lengths_) n += l;
    return n;
  }

  T& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[(i * events_ + j) * attributes_ + k]; }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * events_ + j) * attributes_ + k];
  }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  bool same_shape(const auto& other) const {
    return lengths_ == other.case_lengths() && events_ == other.max_events() && attributes_ == other.num_attributes();
  }

  bool operator==(const SlotTensor&) const = default;

 private:
  std::vector<std::size_t> lengths_;
  std::size_t events_ = 0;
  std::size_t attributes_ = 0;
  std::vector<T> data_;
};

/// Anomaly scores in [0, 1]; padding slots are 0.
using ScoreTensor = SlotTensor<double>;
/// Binary flags (1 = anomalous); padding slots are 0.
using FlagTensor = SlotTensor<std::uint8_t>;
/// Ground-truth or predicted classes; padding slots are Normal.
using LabelTensor = SlotTensor<AnomalyLabel>;

/// Per-slot sets of plausible values (symbols), filled only where requested.
using PredictionSets = SlotTensor<std::vector<std::string>>;

/// Empty tensor shaped like `log` (A includes the activity).
template <class T>
SlotTensor<T> shaped_like(const EventLog& log, T fill = T{}) {
  std::vector<std::size_t> lengths;
  lengths.reserve(log.num_cases());
  for (const auto& c : log.cases()) lengths.push_back(c.events.size());
  return SlotTensor<T>(std::move(lengths), log.max_case_length(), log.num_attributes(), fill);
}

/// Ground-truth labels of a fully labeled log. Throws PreconditionError otherwise.
LabelTensor label_tensor(const EventLog& log);
/// 1 where the label is not Normal.
FlagTensor anomaly_mask(const LabelTensor& labels);

/// Next-event probability vectors of every non-padding slot, stored compactly.
/// The vector for slot (i, j, k) has dims[k] entries indexed like the encoding
/// (0 padding, 1 BOS, >= 2 values).
class Distributions {
 public:
  Distributions() = default;
  Distributions(std::vector<std::size_t> case_lengths, std::vector<std::size_t> dims);

  std::span<double> at(std::size_t i, std::size_t j, std::size_t k);
  std::span<const double> at(std::size_t i, std::size_t j, std::size_t k) const;

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  const std::vector<std::size_t>& case_lengths() const noexcept { return lengths_; }
  std::size_t num_attributes() const noexcept { return dims_.size(); }

 private:
  std::vector<std::size_t> lengths_;
  std::vector<std::size_t> offsets_;  // first event of each case
  std::vector<std::size_t> dims_;
  std::vector<std::vector<double>> values_;  // per attribute: event-major
};

/// Confusion counts of a binary detection with the anomaly as positive class.
struct BinaryCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  double precision() const noexcept { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
  double recall() const noexcept { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
  /// Harmonic mean of precision and recall; 0 when both are 0.
  double f1() const noexcept {
    const double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

BinaryCounts count_binary(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth);

}  // namespace binet
