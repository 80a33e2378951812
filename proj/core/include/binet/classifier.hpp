#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "binet/event_log.hpp"
#include "binet/scores.hpp"
#include "binet/thresholding.hpp"

namespace binet {

/// The six activity rules; data attributes are always Attribute.
enum class Rule { Skip, Insert, Rework, Shift, Late, Early };

std::string_view to_string(Rule rule);

struct ClassifierConfig {
  std::vector<Rule> order = {Rule::Skip, Rule::Insert, Rule::Rework, Rule::Shift, Rule::Late, Rule::Early};
  /// Class of a flagged activity that no rule matches.
  AnomalyLabel fallback = AnomalyLabel::Insert;
};

/// For every flagged slot: the symbols v with sigma(p, p_v) <= tau, where p is
/// the slot's next-event distribution and tau the slot's threshold. Unflagged
/// slots stay empty. Reserved indices are never predictions.
PredictionSets prediction_sets(const Distributions& distributions, const std::vector<Vocabulary>& vocabularies,
                               const FlagTensor& flags, const ThresholdAssignment& assignment);

/// Applies the rules in `config.order` to every flagged activity (first match
/// wins) and labels flagged data attributes Attribute. Unflagged slots are Normal.
/// Throws PreconditionError when the shapes of log, flags and predictions differ.
LabelTensor classify(const EventLog& log, const FlagTensor& flags, const PredictionSets& predictions,
                     const ClassifierConfig& config = {});

struct ClassificationReport {
  /// confusion[true][predicted], indexed by AnomalyLabel.
  std::array<std::array<std::size_t, kNumLabels>, kNumLabels> confusion{};
  /// Per-class F1 over slots that are anomalous and flagged (index 0 unused).
  std::array<double, kNumLabels> class_f1{};
  /// Macro F1 over the anomaly classes present among anomalous, flagged slots.
  double macro_f1 = 0.0;
  /// Macro F1 over all eight classes on every slot (detection and classification).
  double joint_f1 = 0.0;
};

/// Throws PreconditionError on shape mismatch.
ClassificationReport classification_report(const LabelTensor& predicted, const LabelTensor& truth);

/// Rows are true classes, columns predicted classes, with a header row.
std::string confusion_csv(const ClassificationReport& report);

/// The log in the JSON log format with a "predicted" object next to "labels".
std::string classified_log_json(const EventLog& log, const LabelTensor& predicted);

}  // namespace binet
