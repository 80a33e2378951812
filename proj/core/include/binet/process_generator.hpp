#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "binet/event_log.hpp"
#include "binet/likelihood_graph.hpp"
#include "binet/random.hpp"

namespace binet {

struct GeneratorConfig {
  std::size_t num_cases = 1000;
  std::uint64_t seed = 0;
  /// Walks producing more events than this are rejected and resampled.
  std::size_t max_case_length = 100;
};

/// Consecutive rejected walks before sampling gives up.
inline constexpr std::size_t kMaxWalkAttempts = 1000;

/// Random-walk sampler over a validated likelihood graph.
class WalkSampler {
 public:
  /// Throws PreconditionError if the graph does not validate.
  explicit WalkSampler(const LikelihoodGraph& graph);

  /// Node indices of one Start -> End walk (both included). Throws
  /// GenerationError after kMaxWalkAttempts walks longer than `max_case_length` events.
  std::vector<std::size_t> walk(Rng& rng, std::size_t max_case_length) const;
  /// Events emitted along a walk: one per activity node, with the values of
  /// the value nodes that follow it.
  Case to_case(const std::vector<std::size_t>& walk, std::string id) const;

  const LikelihoodGraph& graph() const noexcept { return graph_; }

 private:
  const LikelihoodGraph& graph_;
  std::size_t start_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<std::size_t>> targets_;
};

Case sample_case(const LikelihoodGraph& graph, Rng& rng, std::size_t max_case_length = 100, std::string id = "");

/// Exactly `num_cases` unlabeled cases. Case i uses the RNG stream seed ^ i, so
/// output depends only on (graph, config). Throws PreconditionError for num_cases == 0.
EventLog generate_log(const LikelihoodGraph& graph, const GeneratorConfig& config, std::string name = "");

struct RandomGraphParams {
  std::size_t num_activities = 20;
  std::size_t num_attributes = 1;
  std::size_t values_per_attribute = 10;
  /// Maximum width of choice segments.
  std::size_t branching = 3;
  std::uint64_t seed = 0;
};

/// Random process with sequence, choice, optional, loop and long-term
/// dependency segments (the latter duplicate an activity node per branch).
/// Each activity node gets its own group of allowed attribute values.
LikelihoodGraph random_graph(const RandomGraphParams& params);

/// The paper-submission process with a user attribute (27 activities, 13 users).
LikelihoodGraph paper_process_graph();

}  // namespace binet
