#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace binet {

/// Ground-truth class of one attribute of one event.
enum class AnomalyLabel : std::uint8_t { Normal, Skip, Insert, Rework, Early, Late, Shift, Attribute };

inline constexpr std::size_t kNumLabels = 8;

std::string_view to_string(AnomalyLabel label);
/// Throws ParseError for unknown names.
AnomalyLabel label_from_string(std::string_view name);

/// Name of attribute 0 in every schema.
inline constexpr std::string_view kActivity = "activity";

struct Event {
  std::string activity;
  /// Values of the data attributes, in the order of EventLog::attribute_names().
  std::vector<std::string> attributes;
  /// When present: one label for the activity followed by one per data attribute.
  std::optional<std::vector<AnomalyLabel>> labels;

  bool operator==(const Event&) const = default;
};

struct Case {
  std::string id;
  std::vector<Event> events;

  bool operator==(const Case&) const = default;
};

/// A validated, immutable event log.
///
/// The schema is `activity` followed by the data attribute names. Every event
/// carries exactly one value per data attribute; labels, when present, cover
/// the activity and every data attribute. Case ids are unique and no case is empty.
class EventLog {
 public:
  EventLog() = default;
  /// Throws SchemaError if any case violates the invariants above.
  EventLog(std::string name, std::vector<std::string> attribute_names, std::vector<Case> cases);

  const std::string& name() const noexcept { return name_; }
  /// Data attributes only (without `activity`).
  const std::vector<std::string>& attribute_names() const noexcept { return attribute_names_; }
  /// `activity` followed by the data attributes.
  std::vector<std::string> schema() const;
  /// Number of attributes including the activity (A).
  std::size_t num_attributes() const noexcept { return attribute_names_.size() + 1; }
  const std::vector<Case>& cases() const noexcept { return cases_; }
  std::size_t num_cases() const noexcept { return cases_.size(); }
  std::size_t num_events() const noexcept;
  std::size_t max_case_length() const noexcept;
  /// True if every event carries labels.
  bool is_labeled() const noexcept;

  /// Value of attribute `k` of an event, where k = 0 is the activity.
  static const std::string& value(const Event& event, std::size_t k) {
    return k == 0 ? event.activity : event.attributes[k - 1];
  }

  bool operator==(const EventLog&) const = default;

 private:
  std::string name_;
  std::vector<std::string> attribute_names_;
  std::vector<Case> cases_;
};

/// Copy of `log` with every event labeled Normal (existing labels are kept).
EventLog with_normal_labels(const EventLog& log);

/// Copy of `log` without labels.
EventLog without_labels(const EventLog& log);

/// Case i is anomalous iff any label of any of its events is not Normal.
/// Throws PreconditionError if the log is not fully labeled.
std::vector<bool> case_level_labels(const EventLog& log);

/// Distinct activity symbols of the log, sorted.
std::vector<std::string> activity_alphabet(const EventLog& log);

// ---------------------------------------------------------------------------
// Integer encoding

inline constexpr std::int32_t kPaddingIndex = 0;
inline constexpr std::int32_t kBeginOfCaseIndex = 1;
inline constexpr std::int32_t kFirstValueIndex = 2;

/// Bijection between the symbols of one attribute and the integers >= 2.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Symbols are de-duplicated and sorted before indices are assigned.
  explicit Vocabulary(std::vector<std::string> symbols);

  /// Number of real values |V_a|.
  std::size_t size() const noexcept { return symbols_.size(); }
  /// Width of a one-hot/softmax over this vocabulary including the reserved indices.
  std::size_t dimension() const noexcept { return symbols_.size() + 2; }

  /// Throws VocabularyError for unknown symbols.
  std::int32_t index_of(std::string_view symbol) const;
  std::optional<std::int32_t> find(std::string_view symbol) const;
  /// Throws CorruptionError for reserved or out-of-range indices.
  const std::string& symbol(std::int32_t index) const;
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

  bool operator==(const Vocabulary& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::int32_t> index_;
};

/// Integer tensor F of shape C x E x A with E = max case length + 1.
///
/// Position 0 of every case is the beginning-of-case event (all attributes 1),
/// positions 1..len hold the events, and the rest is padding (0).
struct EncodedLog {
  std::string name;
  std::vector<std::string> schema;
  std::vector<std::string> case_ids;
  std::size_t num_cases = 0;
  std::size_t max_length = 0;  // E
  std::size_t num_attributes = 0;
  std::vector<std::int32_t> features;
  std::vector<Vocabulary> vocabularies;
  std::vector<std::size_t> case_lengths;
  /// Labels of event j (0-based, without BOS) at [(i * (E - 1) + j) * A + k].
  std::optional<std::vector<AnomalyLabel>> labels;

  std::int32_t at(std::size_t c, std::size_t e, std::size_t a) const {
    return features[(c * max_length + e) * num_attributes + a];
  }
  std::int32_t& at(std::size_t c, std::size_t e, std::size_t a) {
    return features[(c * max_length + e) * num_attributes + a];
  }
};

/// Builds dictionaries from the log itself. Throws PreconditionError on an empty log.
EncodedLog encode(const EventLog& log);

/// Encodes against fixed dictionaries (e.g. those of a trained model).
/// `max_length` (E) may be given to pad to a larger tensor; 0 uses the log's own.
/// Throws VocabularyError for unknown symbols and SchemaError on attribute-count mismatch.
EncodedLog encode(const EventLog& log, const std::vector<Vocabulary>& vocabularies,
                  std::size_t max_length = 0);

/// Inverse of encode. Throws CorruptionError for unresolvable indices,
/// misplaced reserved indices or empty cases.
EventLog decode(const EncodedLog& encoded);

// ---------------------------------------------------------------------------
// JSON log files

/// Throws ParseError (with line/column when available) on malformed files.
EventLog load_log(const std::filesystem::path& path);
EventLog parse_log(std::string_view json_text);
/// Writes atomically (temporary file, then rename).
void save_log(const EventLog& log, const std::filesystem::path& path);
std::string log_to_json(const EventLog& log);

}  // namespace binet
