#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "binet/event_log.hpp"
#include "binet/likelihood_graph.hpp"
#include "binet/random.hpp"

namespace binet {

struct InjectionConfig {
  double anomaly_fraction = 0.30;
  /// Relative weights of the injectable types. Normal and Shift must be 0
  /// (Shift is derived from Early/Late, never injected directly).
  std::map<AnomalyLabel, double> type_weights = {
      {AnomalyLabel::Skip, 1.0},  {AnomalyLabel::Insert, 1.0}, {AnomalyLabel::Rework, 1.0},
      {AnomalyLabel::Early, 1.0}, {AnomalyLabel::Late, 1.0},   {AnomalyLabel::Attribute, 1.0}};
  std::uint64_t seed = 0;
  std::size_t max_skip = 3;
  std::size_t max_insert = 3;
  std::size_t max_rework = 3;
  std::size_t max_shift = 2;
  std::size_t max_attribute = 3;

  /// Throws PreconditionError when weights or the fraction are invalid.
  void validate() const;
};

/// Which attribute values are "direct successors" of the node preceding an
/// event's attribute. Built from the generating graph, or approximated from
/// the values observed in a clean log.
class SuccessorOracle {
 public:
  static SuccessorOracle from_graph(const LikelihoodGraph& graph);
  static SuccessorOracle from_log(const EventLog& log);

  /// Values of data attribute `attribute` (0-based, without activity) that may
  /// directly follow the activity and the event's earlier attribute values.
  std::set<std::string> allowed(const Event& event, std::size_t attribute) const;
  /// Global domain of data attribute `attribute`.
  const std::vector<std::string>& domain(std::size_t attribute) const { return domains_.at(attribute); }
  std::size_t num_attributes() const noexcept { return domains_.size(); }

 private:
  // Key: activity followed by the values of attributes 0..k-1.
  std::vector<std::map<std::vector<std::string>, std::set<std::string>>> allowed_;
  std::vector<std::vector<std::string>> domains_;
};

/// Names used for inserted events: "Random activity 1..n" and
/// "Random <attribute> 1..n", none of which occur in the source process.
class InsertPool {
 public:
  InsertPool(const EventLog& log);

  Event draw(Rng& rng) const;
  const std::vector<std::string>& activities() const noexcept { return activities_; }

 private:
  std::vector<std::string> activities_;
  std::vector<std::vector<std::string>> values_;
};

// Deterministic transforms. Inputs must carry labels (use with_normal_labels);
// each returns std::nullopt when the case is too short for the request.

/// Removes events [start, start + k). The activity of the event now at `start`
/// is labeled Skip (the last remaining event if the gap is at the end).
std::optional<Case> skip_at(const Case& c, std::size_t start, std::size_t k);
/// Inserts `events` so that events[i] ends up at index positions[i] (ascending);
/// every attribute of an inserted event is labeled Insert.
std::optional<Case> insert_at(const Case& c, const std::vector<std::size_t>& positions, std::vector<Event> events);
/// Repeats [start, start + k) directly after itself; the copies' activities are labeled Rework.
std::optional<Case> rework_at(const Case& c, std::size_t start, std::size_t k);
/// Moves [start, start + k) in front of the event with original index `destination`
/// (destination < start). Moved activities are labeled Early; the event that now
/// follows the vacated position is labeled Shift (the one before it if the gap is at the end).
std::optional<Case> move_early(const Case& c, std::size_t start, std::size_t k, std::size_t destination);
/// Moves [start, start + k) behind the event with original index `destination`
/// (destination >= start + k). Moved activities are labeled Late; the event that
/// now follows the vacated position is labeled Shift.
std::optional<Case> move_late(const Case& c, std::size_t start, std::size_t k, std::size_t destination);
/// Sets data attribute `attribute` of event `index` to `value`, labeled Attribute.
std::optional<Case> replace_attribute(const Case& c, std::size_t index, std::size_t attribute, std::string value);

// Randomized transforms: choose k and positions, then apply the transform above.

std::optional<Case> apply_skip(const Case& c, std::size_t k, Rng& rng);
std::optional<Case> apply_insert(const Case& c, std::size_t k, Rng& rng, const InsertPool& pool);
std::optional<Case> apply_rework(const Case& c, std::size_t k, Rng& rng);
std::optional<Case> apply_early(const Case& c, std::size_t k, Rng& rng);
std::optional<Case> apply_late(const Case& c, std::size_t k, Rng& rng);
/// Replaces one data attribute in each of k distinct events with a value from the
/// global domain that is not an allowed direct successor at that position.
std::optional<Case> apply_attribute(const Case& c, std::size_t k, Rng& rng, const SuccessorOracle& oracle);

/// What was done to one altered case.
struct InjectionRecord {
  std::size_t case_index;
  AnomalyLabel type;
  std::size_t size;
  Case original;
};

struct InjectionResult {
  EventLog log;
  std::vector<InjectionRecord> records;
};

/// Alters exactly round(fraction * C) uniformly chosen cases with one anomaly
/// each and labels every attribute of every event. Types that do not fit a
/// case are resampled. Without an oracle, attribute anomalies use the values
/// observed in `log` as the successor sets.
InjectionResult inject_with_records(const EventLog& log, const InjectionConfig& config,
                                    const SuccessorOracle* oracle = nullptr);
EventLog inject(const EventLog& log, const InjectionConfig& config, const SuccessorOracle* oracle = nullptr);

}  // namespace binet
