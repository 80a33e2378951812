#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "binet/event_log.hpp"
#include "binet/likelihood_graph.hpp"
#include "binet/scores.hpp"

namespace binet {

/// Counts of attribute values given the k - 1 preceding events (all attributes).
/// Windows reaching before the first event are filled with a BOS marker.
class NgramTable {
 public:
  explicit NgramTable(std::size_t k = 2);

  void fit(const EventLog& log);
  /// Relative frequency of `value` for attribute `attribute` after `context`; 0 if unseen.
  double probability(const std::vector<std::string>& context, std::size_t attribute, const std::string& value) const;
  /// Flattened window that precedes event j of `c`.
  std::vector<std::string> context(const Case& c, std::size_t j) const;

  std::size_t window() const noexcept { return k_; }
  std::size_t count(const std::vector<std::string>& context, std::size_t attribute, const std::string& value) const;
  std::size_t context_total(const std::vector<std::string>& context) const;

 private:
  std::size_t k_;
  std::size_t width_ = 0;
  std::map<std::vector<std::string>, std::size_t> totals_;
  std::map<std::vector<std::string>, std::vector<std::map<std::string, std::size_t>>> counts_;
};

/// t-STIDE+: score = 1 - P(value | preceding window), counted on the log itself.
ScoreTensor tstide_score(const EventLog& log, std::size_t k = 2);

/// Naive+: per case 1 - count(variant) / count(most frequent variant), written to
/// the activity slots of the case; data attributes score 0.
ScoreTensor naive_score(const EventLog& log);
/// Naive: flags every activity slot of cases whose variant frequency is below `tau`.
FlagTensor naive_flags(const EventLog& log, double tau = 0.02);

/// Likelihood graph mined from a log: one node per activity symbol, one per
/// observed (activity, value chain) prefix, weights = empirical frequencies.
LikelihoodGraph mine_likelihood_graph(const EventLog& log);

/// Likelihood+: every attribute scores sigma(outgoing distribution of the
/// preceding node, probability of the observed transition). Missing transitions
/// score 1 (p_v = 0).
ScoreTensor likelihood_score(const LikelihoodGraph& graph, const EventLog& log);
/// Likelihood: flags slots whose score exceeds 1 - delta; with delta = 0 nothing
/// is ever flagged on a self-mined log.
FlagTensor likelihood_flags(const LikelihoodGraph& graph, const EventLog& log, double delta = 0.0);

}  // namespace binet
