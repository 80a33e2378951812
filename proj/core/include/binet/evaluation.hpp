#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "binet/event_log.hpp"
#include "binet/scores.hpp"

namespace binet {

enum class Level { Case, Attribute };

std::string_view to_string(Level level);
Level level_from_string(std::string_view name);

/// Binary counts with the anomaly as positive class. At case level a case is
/// flagged (anomalous) when any of its slots is. Throws PreconditionError on shape mismatch.
BinaryCounts detection_counts(const FlagTensor& flags, const LabelTensor& truth, Level level);
/// Convenience overload; throws PreconditionError if `log` is unlabeled.
BinaryCounts detection_counts(const FlagTensor& flags, const EventLog& log, Level level);

/// F1 by (dataset, method). Higher F1 ranks better (rank 1); ties share the mean rank.
struct RankTable {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  /// f1[dataset][method]
  std::vector<std::vector<double>> f1;

  std::vector<std::vector<double>> ranks() const;
  std::vector<double> average_ranks() const;
};

/// Ranks of `values` in descending order, 1-based, ties averaged.
std::vector<double> descending_ranks(const std::vector<double>& values);

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t datasets = 0;
  std::size_t methods = 0;
};

/// Chi-square form of the Friedman statistic on the average ranks, with its
/// upper-tail p-value at k - 1 degrees of freedom. Needs N >= 2 and k >= 2.
FriedmanResult friedman_test(const RankTable& table);

/// Regularized lower incomplete gamma P(a, x) (series / continued fraction).
double regularized_gamma_p(double a, double x);
/// Upper tail of the chi-square distribution.
double chi_square_survival(double x, double dof);

/// Studentized range quantile divided by sqrt(2) at alpha = 0.05, for 2 <= k <= 20.
double nemenyi_q(std::size_t k);
/// CD = q * sqrt(k (k + 1) / (6 N)).
double nemenyi_cd(std::size_t k, std::size_t n);

/// Maximal sets of methods whose average ranks all lie within `cd` of each
/// other, as method indices sorted by rank. Singletons are included.
std::vector<std::vector<std::size_t>> cd_groups(const std::vector<double>& average_ranks, double cd);

}  // namespace binet
