#include "binet/scores.hpp"

#include "binet/errors.hpp"

namespace binet {

LabelTensor label_tensor(const EventLog& log) {
  if (!log.is_labeled()) throw PreconditionError("log is not fully labeled");
  LabelTensor labels = shaped_like<AnomalyLabel>(log, AnomalyLabel::Normal);
  for (std::size_t i = 0; i < log.num_cases(); ++i) {
    const auto& events = log.cases()[i].events;
    for (std::size_t j = 0; j < events.size(); ++j) {
      for (std::size_t k = 0; k < log.num_attributes(); ++k) labels(i, j, k) = (*events[j].labels)[k];
    }
  }
  return labels;
}

FlagTensor anomaly_mask(const LabelTensor& labels) {
  FlagTensor mask(labels.case_lengths(), labels.max_events(), labels.num_attributes(), 0);
  for (std::size_t n = 0; n < labels.data().size(); ++n) {
    mask.data()[n] = labels.data()[n] != AnomalyLabel::Normal ? 1 : 0;
  }
  return mask;
}

Distributions::Distributions(std::vector<std::size_t> case_lengths, std::vector<std::size_t> dims)
    : lengths_(std::move(case_lengths)), dims_(std::move(dims)) {
  std::size_t total = 0;
  offsets_.reserve(lengths_.size());
  for (std::size_t l : lengths_) {
    offsets_.push_back(total);
    total += l;
  }
  for (std::size_t d : dims_) values_.emplace_back(total * d, 0.0);
}

std::span<double> Distributions::at(std::size_t i, std::size_t j, std::size_t k) {
  if (j >= lengths_[i]) throw PreconditionError("distribution requested for a padding slot");
  return std::span<double>(values_[k]).subspan((offsets_[i] + j) * dims_[k], dims_[k]);
}

std::span<const double> Distributions::at(std::size_t i, std::size_t j, std::size_t k) const {
  if (j >= lengths_[i]) throw PreconditionError("distribution requested for a padding slot");
  return std::span<const double>(values_[k]).subspan((offsets_[i] + j) * dims_[k], dims_[k]);
}

BinaryCounts count_binary(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth) {
  if (predicted.size() != truth.size()) throw PreconditionError("count_binary: size mismatch");
  BinaryCounts counts;
  for (std::size_t n = 0; n < predicted.size(); ++n) {
    const bool p = predicted[n] != 0, t = truth[n] != 0;
    if (p && t) ++counts.tp;
    else if (p) ++counts.fp;
    else if (t) ++counts.fn;
    else ++counts.tn;
  }
  return counts;
}

}  // namespace binet
