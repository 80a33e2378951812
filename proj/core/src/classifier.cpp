#include "binet/classifier.hpp"

#include <algorithm>
#include <sstream>

#include "binet/errors.hpp"
#include "io_util.hpp"

namespace binet {

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::Skip: return "skip";
    case Rule::Insert: return "insert";
    case Rule::Rework: return "rework";
    case Rule::Shift: return "shift";
    case Rule::Late: return "late";
    case Rule::Early: return "early";
  }
  return "?";
}

PredictionSets prediction_sets(const Distributions& distributions, const std::vector<Vocabulary>& vocabularies,
                               const FlagTensor& flags, const ThresholdAssignment& assignment) {
  if (distributions.case_lengths() != flags.case_lengths() || distributions.num_attributes() != flags.num_attributes() ||
      vocabularies.size() != flags.num_attributes()) {
    throw PreconditionError("prediction_sets: distributions, dictionaries and flags differ in shape");
  }
  PredictionSets sets(flags.case_lengths(), flags.max_events(), flags.num_attributes());
  for (std::size_t i = 0; i < flags.num_cases(); ++i) {
    for (std::size_t j = 0; j < flags.case_length(i); ++j) {
      for (std::size_t k = 0; k < flags.num_attributes(); ++k) {
        if (!flags(i, j, k)) continue;
        const auto p = distributions.at(i, j, k);
        const double tau = assignment.at(j, k);
        auto& out = sets(i, j, k);
        for (std::size_t v = kFirstValueIndex; v < p.size(); ++v) {
          if (sigma_unchecked(p, p[v]) <= tau) out.push_back(vocabularies[k].symbol(static_cast<std::int32_t>(v)));
        }
      }
    }
  }
  return sets;
}

namespace {

bool contains(const std::vector<std::string>& set, const std::string& value) {
  return std::find(set.begin(), set.end(), value) != set.end();
}

struct CaseView {
  const Case& c;
  std::size_t i;
  const FlagTensor& flags;
  const PredictionSets& predictions;

  bool flagged(std::size_t m) const { return flags(i, m, 0) != 0; }
  const std::string& activity(std::size_t m) const { return c.events[m].activity; }
  const std::vector<std::string>& predicted(std::size_t m) const { return predictions(i, m, 0); }
};

bool matches(Rule rule, const CaseView& v, std::size_t j) {
  const std::size_t n = v.c.events.size();
  const std::string& own = v.activity(j);
  const auto& P = v.predicted(j);
  switch (rule) {
    case Rule::Skip:
      for (std::size_t m = 0; m < n; ++m) {
        if (m != j && contains(P, v.activity(m))) return false;
      }
      return true;
    case Rule::Insert: {
      // The observed activity must be foreign to the rest of the case; otherwise
      // a repeated or displaced activity would always be explained as an insert.
      for (std::size_t m = 0; m < n; ++m) {
        if (m == j) continue;
        if (v.activity(m) == own) return false;
        if (v.flagged(m) && contains(v.predicted(m), own)) return false;
      }
      for (std::size_t m = 0; m < n; ++m) {
        if (m != j && !v.flagged(m) && contains(P, v.activity(m))) return true;
      }
      return false;
    }
    case Rule::Rework:
      for (std::size_t m = 0; m < j; ++m) {
        if (v.activity(m) == own && !v.flagged(m)) return true;
      }
      return false;
    case Rule::Shift:
      for (std::size_t m = 0; m < n; ++m) {
        if (m != j && v.flagged(m) && contains(P, v.activity(m))) return true;
      }
      return false;
    case Rule::Late:
      for (std::size_t m = 0; m < j; ++m) {
        if (v.flagged(m) && contains(v.predicted(m), own)) return true;
      }
      return false;
    case Rule::Early:
      for (std::size_t m = j + 1; m < n; ++m) {
        if (v.flagged(m) && contains(v.predicted(m), own)) return true;
      }
      return false;
  }
  return false;
}

AnomalyLabel label_of(Rule rule) {
  switch (rule) {
    case Rule::Skip: return AnomalyLabel::Skip;
    case Rule::Insert: return AnomalyLabel::Insert;
    case Rule::Rework: return AnomalyLabel::Rework;
    case Rule::Shift: return AnomalyLabel::Shift;
    case Rule::Late: return AnomalyLabel::Late;
    case Rule::Early: return AnomalyLabel::Early;
  }
  return AnomalyLabel::Normal;
}

}  // namespace

LabelTensor classify(const EventLog& log, const FlagTensor& flags, const PredictionSets& predictions,
                     const ClassifierConfig& config) {
  LabelTensor result = shaped_like<AnomalyLabel>(log, AnomalyLabel::Normal);
  if (!result.same_shape(flags) || !result.same_shape(predictions)) {
    throw PreconditionError("classify: log, flags and predictions differ in shape");
  }
  for (std::size_t i = 0; i < log.num_cases(); ++i) {
    const CaseView view{log.cases()[i], i, flags, predictions};
    for (std::size_t j = 0; j < view.c.events.size(); ++j) {
      for (std::size_t k = 1; k < log.num_attributes(); ++k) {
        if (flags(i, j, k)) result(i, j, k) = AnomalyLabel::Attribute;
      }
      if (!view.flagged(j)) continue;
      AnomalyLabel label = config.fallback;
      for (Rule rule : config.order) {
        if (matches(rule, view, j)) {
          label = label_of(rule);
          break;
        }
      }
      result(i, j, 0) = label;
    }
  }
  return result;
}

namespace {

double macro_f1(const std::array<std::array<std::size_t, kNumLabels>, kNumLabels>& cm, std::size_t first,
                std::array<double, kNumLabels>* per_class) {
  double total = 0.0;
  std::size_t classes = 0;
  for (std::size_t c = first; c < kNumLabels; ++c) {
    std::size_t tp = cm[c][c], row = 0, col = 0;
    for (std::size_t o = first; o < kNumLabels; ++o) {
      row += cm[c][o];
      col += cm[o][c];
    }
    if (row == 0 && col == 0) continue;
    const double f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(row + col);
    if (per_class) (*per_class)[c] = f1;
    total += f1;
    ++classes;
  }
  return classes == 0 ? 0.0 : total / static_cast<double>(classes);
}

}  // namespace

ClassificationReport classification_report(const LabelTensor& predicted, const LabelTensor& truth) {
  if (!predicted.same_shape(truth)) throw PreconditionError("classification_report: shape mismatch");
  ClassificationReport report;
  std::array<std::array<std::size_t, kNumLabels>, kNumLabels> detected{};
  for (std::size_t i = 0; i < truth.num_cases(); ++i) {
    for (std::size_t j = 0; j < truth.case_length(i); ++j) {
      for (std::size_t k = 0; k < truth.num_attributes(); ++k) {
        const auto t = static_cast<std::size_t>(truth(i, j, k));
        const auto p = static_cast<std::size_t>(predicted(i, j, k));
        ++report.confusion[t][p];
        if (t != 0 && p != 0) ++detected[t][p];
      }
    }
  }
  report.macro_f1 = macro_f1(detected, 1, &report.class_f1);
  report.joint_f1 = macro_f1(report.confusion, 0, nullptr);
  return report;
}

std::string confusion_csv(const ClassificationReport& report) {
  std::ostringstream out;
  out << "true\\predicted";
  for (std::size_t c = 0; c < kNumLabels; ++c) out << ',' << to_string(static_cast<AnomalyLabel>(c));
  out << '\n';
  for (std::size_t t = 0; t < kNumLabels; ++t) {
    out << to_string(static_cast<AnomalyLabel>(t));
    for (std::size_t p = 0; p < kNumLabels; ++p) out << ',' << report.confusion[t][p];
    out << '\n';
  }
  return out.str();
}

std::string classified_log_json(const EventLog& log, const LabelTensor& predicted) {
  const LabelTensor shape = shaped_like<AnomalyLabel>(log);
  if (!shape.same_shape(predicted)) throw PreconditionError("classified_log_json: shape mismatch");
  auto root = detail::parse_json(log_to_json(log), "event log");
  auto& cases = root["cases"];
  for (std::size_t i = 0; i < log.num_cases(); ++i) {
    auto& events = cases[i]["events"];
    for (std::size_t j = 0; j < log.cases()[i].events.size(); ++j) {
      nlohmann::ordered_json p = nlohmann::ordered_json::object();
      p["activity"] = std::string(to_string(predicted(i, j, 0)));
      for (std::size_t k = 1; k < log.num_attributes(); ++k) {
        p[log.attribute_names()[k - 1]] = std::string(to_string(predicted(i, j, k)));
      }
      events[j]["predicted"] = std::move(p);
    }
  }
  return root.dump(2) + "\n";
}

}  // namespace binet
