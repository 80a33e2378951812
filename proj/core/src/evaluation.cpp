#include "binet/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "binet/errors.hpp"

namespace binet {

std::string_view to_string(Level level) { return level == Level::Case ? "case" : "attribute"; }

Level level_from_string(std::string_view name) {
  if (name == "case") return Level::Case;
  if (name == "attribute" || name == "attr") return Level::Attribute;
  throw ParseError("unknown detection level '" + std::string(name) + "'");
}

BinaryCounts detection_counts(const FlagTensor& flags, const LabelTensor& truth, Level level) {
  if (!flags.same_shape(truth)) throw PreconditionError("detection_counts: flags and labels differ in shape");
  if (level == Level::Attribute) {
    BinaryCounts counts;
    for (std::size_t i = 0; i < truth.num_cases(); ++i) {
      for (std::size_t j = 0; j < truth.case_length(i); ++j) {
        for (std::size_t k = 0; k < truth.num_attributes(); ++k) {
          const bool p = flags(i, j, k) != 0;
          const bool t = truth(i, j, k) != AnomalyLabel::Normal;
          if (p && t) ++counts.tp;
          else if (p) ++counts.fp;
          else if (t) ++counts.fn;
          else ++counts.tn;
        }
      }
    }
    return counts;
  }
  std::vector<std::uint8_t> predicted(truth.num_cases(), 0), actual(truth.num_cases(), 0);
  for (std::size_t i = 0; i < truth.num_cases(); ++i) {
    for (std::size_t j = 0; j < truth.case_length(i); ++j) {
      for (std::size_t k = 0; k < truth.num_attributes(); ++k) {
        if (flags(i, j, k)) predicted[i] = 1;
        if (truth(i, j, k) != AnomalyLabel::Normal) actual[i] = 1;
      }
    }
  }
  return count_binary(predicted, actual);
}

BinaryCounts detection_counts(const FlagTensor& flags, const EventLog& log, Level level) {
  return detection_counts(flags, label_tensor(log), level);
}

std::vector<double> descending_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t s = 0; s < order.size();) {
    std::size_t e = s;
    while (e + 1 < order.size() && values[order[e + 1]] == values[order[s]]) ++e;
    const double mean = (static_cast<double>(s + 1) + static_cast<double>(e + 1)) / 2.0;
    for (std::size_t m = s; m <= e; ++m) ranks[order[m]] = mean;
    s = e + 1;
  }
  return ranks;
}

std::vector<std::vector<double>> RankTable::ranks() const {
  std::vector<std::vector<double>> result;
  result.reserve(f1.size());
  for (const auto& row : f1) {
    if (row.size() != methods.size()) throw PreconditionError("rank table: row width differs from method count");
    result.push_back(descending_ranks(row));
  }
  return result;
}

std::vector<double> RankTable::average_ranks() const {
  std::vector<double> mean(methods.size(), 0.0);
  const auto r = ranks();
  for (const auto& row : r) {
    for (std::size_t m = 0; m < row.size(); ++m) mean[m] += row[m];
  }
  for (double& v : mean) v /= static_cast<double>(std::max<std::size_t>(r.size(), 1));
  return mean;
}

namespace {

double gamma_series(double a, double x) {
  double sum = 1.0 / a, term = sum;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper tail Q(a, x) by the modified Lentz continued fraction.
double gamma_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw PreconditionError("regularized_gamma_p: need a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double chi_square_survival(double x, double dof) {
  if (!(dof > 0.0)) throw PreconditionError("chi_square_survival: dof must be positive");
  if (x <= 0.0) return 1.0;
  const double a = dof / 2.0, y = x / 2.0;
  if (y < a + 1.0) return 1.0 - gamma_series(a, y);
  return gamma_continued_fraction(a, y);
}

FriedmanResult friedman_test(const RankTable& table) {
  const std::size_t n = table.f1.size(), k = table.methods.size();
  if (n < 2 || k < 2) throw PreconditionError("friedman_test: need at least 2 datasets and 2 methods");
  const auto mean = table.average_ranks();
  double sum_sq = 0.0;
  for (double r : mean) sum_sq += r * r;
  const double kd = static_cast<double>(k), nd = static_cast<double>(n);
  FriedmanResult result;
  result.datasets = n;
  result.methods = k;
  result.statistic = 12.0 * nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
  // Summation error can leave a tiny negative value for all-equal ranks.
  if (result.statistic < 1e-12) result.statistic = 0.0;
  result.p_value = chi_square_survival(result.statistic, kd - 1.0);
  return result;
}

double nemenyi_q(std::size_t k) {
  static constexpr std::array<double, 19> q = {1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164, 3.219,
                                               3.268, 3.313, 3.354, 3.391, 3.426, 3.458, 3.489, 3.517, 3.544};
  if (k < 2 || k > 20) throw PreconditionError("nemenyi_q: k must lie in [2, 20]");
  return q[k - 2];
}

double nemenyi_cd(std::size_t k, std::size_t n) {
  if (n == 0) throw PreconditionError("nemenyi_cd: N must be positive");
  const double kd = static_cast<double>(k);
  return nemenyi_q(k) * std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n)));
}

std::vector<std::vector<std::size_t>> cd_groups(const std::vector<double>& average_ranks, double cd) {
  std::vector<std::size_t> order(average_ranks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return average_ranks[a] < average_ranks[b]; });
  std::vector<std::vector<std::size_t>> groups;
  std::size_t last_end = 0;
  for (std::size_t s = 0; s < order.size(); ++s) {
    std::size_t e = s;
    while (e + 1 < order.size() && average_ranks[order[e + 1]] - average_ranks[order[s]] <= cd) ++e;
    // A window ending where the previous one ended is contained in it.
    if (s > 0 && e + 1 <= last_end) continue;
    groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(s), order.begin() + static_cast<std::ptrdiff_t>(e + 1));
    last_end = e + 1;
  }
  return groups;
}

}  // namespace binet
