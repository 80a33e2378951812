#include "binet/event_log.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <unordered_set>

#include "binet/errors.hpp"

namespace binet {

namespace {

constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "Normal", "Skip", "Insert", "Rework", "Early", "Late", "Shift", "Attribute"};

}  // namespace

std::string_view to_string(AnomalyLabel label) {
  return kLabelNames[static_cast<std::size_t>(label)];
}

AnomalyLabel label_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kLabelNames.size(); ++i) {
    if (kLabelNames[i] == name) return static_cast<AnomalyLabel>(i);
  }
  throw ParseError("unknown anomaly label '" + std::string(name) + "'");
}

EventLog::EventLog(std::string name, std::vector<std::string> attribute_names,
                   std::vector<Case> cases)
    : name_(std::move(name)), attribute_names_(std::move(attribute_names)), cases_(std::move(cases)) {
  std::unordered_set<std::string> names;
  for (const auto& attribute : attribute_names_) {
    if (attribute == kActivity) throw SchemaError("'activity' is reserved for attribute 0");
    if (attribute.empty()) throw SchemaError("empty attribute name");
    if (!names.insert(attribute).second) throw SchemaError("duplicate attribute '" + attribute + "'");
  }
  std::unordered_set<std::string> ids;
  ids.reserve(cases_.size());
  const std::size_t width = attribute_names_.size();
  for (const auto& c : cases_) {
    if (!ids.insert(c.id).second) throw SchemaError("duplicate case id '" + c.id + "'");
    if (c.events.empty()) throw SchemaError("case '" + c.id + "' has no events");
    for (const auto& event : c.events) {
      if (event.attributes.size() != width) {
        throw SchemaError("case '" + c.id + "': event has " + std::to_string(event.attributes.size()) +
                          " attribute values, schema has " + std::to_string(width));
      }
      if (event.labels && event.labels->size() != width + 1) {
        throw SchemaError("case '" + c.id + "': labels must cover activity and every attribute");
      }
    }
  }
}

std::vector<std::string> EventLog::schema() const {
  std::vector<std::string> result;
  result.reserve(attribute_names_.size() + 1);
  result.emplace_back(kActivity);
  result.insert(result.end(), attribute_names_.begin(), attribute_names_.end());
  return result;
}

std::size_t EventLog::num_events() const noexcept {
  std::size_t total = 0;
  for (const auto& c : cases_) total += c.events.size();
  return total;
}

std::size_t EventLog::max_case_length() const noexcept {
  std::size_t longest = 0;
  for (const auto& c : cases_) longest = std::max(longest, c.events.size());
  return longest;
}

bool EventLog::is_labeled() const noexcept {
  for (const auto& c : cases_) {
    for (const auto& event : c.events) {
      if (!event.labels) return false;
    }
  }
  return true;
}

EventLog with_normal_labels(const EventLog& log) {
  std::vector<Case> cases = log.cases();
  for (auto& c : cases) {
    for (auto& event : c.events) {
      if (!event.labels) event.labels.emplace(log.num_attributes(), AnomalyLabel::Normal);
    }
  }
  return EventLog(log.name(), log.attribute_names(), std::move(cases));
}

EventLog without_labels(const EventLog& log) {
  std::vector<Case> cases = log.cases();
  for (auto& c : cases) {
    for (auto& event : c.events) event.labels.reset();
  }
  return EventLog(log.name(), log.attribute_names(), std::move(cases));
}

std::vector<bool> case_level_labels(const EventLog& log) {
  std::vector<bool> result;
  result.reserve(log.num_cases());
  for (const auto& c : log.cases()) {
    bool anomalous = false;
    for (const auto& event : c.events) {
      if (!event.labels) throw PreconditionError("case_level_labels: case '" + c.id + "' is unlabeled");
      for (AnomalyLabel label : *event.labels) anomalous = anomalous || label != AnomalyLabel::Normal;
    }
    result.push_back(anomalous);
  }
  return result;
}

std::vector<std::string> activity_alphabet(const EventLog& log) {
  std::set<std::string> symbols;
  for (const auto& c : log.cases()) {
    for (const auto& event : c.events) symbols.insert(event.activity);
  }
  return {symbols.begin(), symbols.end()};
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  std::sort(symbols_.begin(), symbols_.end());
  symbols_.erase(std::unique(symbols_.begin(), symbols_.end()), symbols_.end());
  index_.reserve(symbols_.size());
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    index_.emplace(symbols_[i], static_cast<std::int32_t>(i) + kFirstValueIndex);
  }
}

std::int32_t Vocabulary::index_of(std::string_view symbol) const {
  auto found = find(symbol);
  if (!found) throw VocabularyError("unknown symbol '" + std::string(symbol) + "'");
  return *found;
}

std::optional<std::int32_t> Vocabulary::find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::symbol(std::int32_t index) const {
  if (index < kFirstValueIndex || static_cast<std::size_t>(index - kFirstValueIndex) >= symbols_.size()) {
    throw CorruptionError("index " + std::to_string(index) + " is not in the dictionary");
  }
  return symbols_[static_cast<std::size_t>(index - kFirstValueIndex)];
}

namespace {

std::vector<Vocabulary> build_vocabularies(const EventLog& log) {
  const std::size_t width = log.num_attributes();
  std::vector<std::vector<std::string>> symbols(width);
  std::vector<std::unordered_set<std::string>> seen(width);
  for (const auto& c : log.cases()) {
    for (const auto& event : c.events) {
      for (std::size_t k = 0; k < width; ++k) {
        const std::string& value = EventLog::value(event, k);
        if (seen[k].insert(value).second) symbols[k].push_back(value);
      }
    }
  }
  std::vector<Vocabulary> result;
  result.reserve(width);
  for (auto& s : symbols) result.emplace_back(std::move(s));
  return result;
}

}  // namespace

EncodedLog encode(const EventLog& log) {
  if (log.num_cases() == 0) throw PreconditionError("encode: empty log");
  return encode(log, build_vocabularies(log));
}

EncodedLog encode(const EventLog& log, const std::vector<Vocabulary>& vocabularies, std::size_t max_length) {
  if (log.num_cases() == 0) throw PreconditionError("encode: empty log");
  if (vocabularies.size() != log.num_attributes()) {
    throw SchemaError("encode: " + std::to_string(vocabularies.size()) + " dictionaries for " +
                      std::to_string(log.num_attributes()) + " attributes");
  }
  EncodedLog out;
  out.name = log.name();
  out.schema = log.schema();
  out.num_cases = log.num_cases();
  out.num_attributes = log.num_attributes();
  const std::size_t needed = log.max_case_length() + 1;
  if (max_length != 0 && max_length < needed) {
    throw PreconditionError("encode: tensor length " + std::to_string(max_length) +
                            " is shorter than the longest case + 1 (" + std::to_string(needed) + ")");
  }
  out.max_length = max_length == 0 ? needed : max_length;
  out.vocabularies = vocabularies;
  out.features.assign(out.num_cases * out.max_length * out.num_attributes, kPaddingIndex);
  out.case_ids.reserve(out.num_cases);
  out.case_lengths.reserve(out.num_cases);

  const bool labeled = log.is_labeled();
  const std::size_t events_per_case = out.max_length - 1;
  if (labeled) {
    out.labels.emplace(out.num_cases * events_per_case * out.num_attributes, AnomalyLabel::Normal);
  }

  for (std::size_t i = 0; i < out.num_cases; ++i) {
    const Case& c = log.cases()[i];
    out.case_ids.push_back(c.id);
    out.case_lengths.push_back(c.events.size());
    for (std::size_t k = 0; k < out.num_attributes; ++k) out.at(i, 0, k) = kBeginOfCaseIndex;
    for (std::size_t j = 0; j < c.events.size(); ++j) {
      const Event& event = c.events[j];
      for (std::size_t k = 0; k < out.num_attributes; ++k) {
        out.at(i, j + 1, k) = vocabularies[k].index_of(EventLog::value(event, k));
        if (labeled) (*out.labels)[(i * events_per_case + j) * out.num_attributes + k] = (*event.labels)[k];
      }
    }
  }
  return out;
}

EventLog decode(const EncodedLog& encoded) {
  const std::size_t width = encoded.num_attributes;
  if (encoded.schema.size() != width || encoded.vocabularies.size() != width || width == 0) {
    throw CorruptionError("decode: schema, dictionaries and attribute count disagree");
  }
  if (encoded.features.size() != encoded.num_cases * encoded.max_length * width ||
      encoded.case_ids.size() != encoded.num_cases) {
    throw CorruptionError("decode: tensor size does not match its dimensions");
  }
  const std::size_t events_per_case = encoded.max_length == 0 ? 0 : encoded.max_length - 1;
  std::vector<Case> cases;
  cases.reserve(encoded.num_cases);
  for (std::size_t i = 0; i < encoded.num_cases; ++i) {
    Case c;
    c.id = encoded.case_ids[i];
    for (std::size_t k = 0; k < width; ++k) {
      if (encoded.at(i, 0, k) != kBeginOfCaseIndex) {
        throw CorruptionError("decode: case '" + c.id + "' does not start with the beginning-of-case event");
      }
    }
    bool in_padding = false;
    for (std::size_t e = 1; e < encoded.max_length; ++e) {
      std::size_t zeros = 0;
      for (std::size_t k = 0; k < width; ++k) zeros += encoded.at(i, e, k) == kPaddingIndex;
      if (zeros == width) {
        in_padding = true;
        continue;
      }
      if (in_padding || zeros != 0) {
        throw CorruptionError("decode: case '" + c.id + "' has padding that is not a contiguous suffix");
      }
      Event event;
      event.activity = encoded.vocabularies[0].symbol(encoded.at(i, e, 0));
      for (std::size_t k = 1; k < width; ++k) {
        event.attributes.push_back(encoded.vocabularies[k].symbol(encoded.at(i, e, k)));
      }
      if (encoded.labels) {
        std::vector<AnomalyLabel> labels(width);
        for (std::size_t k = 0; k < width; ++k) {
          labels[k] = (*encoded.labels)[(i * events_per_case + (e - 1)) * width + k];
        }
        event.labels = std::move(labels);
      }
      c.events.push_back(std::move(event));
    }
    if (c.events.empty()) throw CorruptionError("decode: case '" + c.id + "' has no events");
    cases.push_back(std::move(c));
  }
  std::vector<std::string> attributes(encoded.schema.begin() + 1, encoded.schema.end());
  try {
    return EventLog(encoded.name, std::move(attributes), std::move(cases));
  } catch (const SchemaError& error) {
    throw CorruptionError(std::string("decode: ") + error.what());
  }
}

}  // namespace binet
