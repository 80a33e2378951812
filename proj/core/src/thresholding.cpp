#include "binet/thresholding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "binet/errors.hpp"
#include "io_util.hpp"

namespace binet {

double sigma_unchecked(std::span<const double> p, double p_v) noexcept {
  double total = 0.0;
  for (double q : p) {
    if (q > p_v) total += q;
  }
  return total;
}

double sigma(std::span<const double> p, double p_v) {
  double sum = 0.0;
  for (double q : p) {
    if (!(q >= 0.0 && q <= 1.0)) throw NumericError("sigma: probabilities must lie in [0, 1]");
    sum += q;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw NumericError("sigma: probabilities must sum to 1");
  if (!(p_v >= 0.0 && p_v <= 1.0)) throw NumericError("sigma: p_v must lie in [0, 1]");
  return sigma_unchecked(p, p_v);
}

namespace {

constexpr std::array<std::string_view, 4> kStrategyNames = {"global", "per_attribute", "per_event",
                                                            "per_event_attribute"};
constexpr std::array<std::string_view, 4> kStrategyShort = {"global", "attr", "event", "event-attr"};
constexpr std::array<std::string_view, 6> kHeuristicNames = {"lp_left",    "lp_center", "lp_right",
                                                             "elbow_down", "elbow_up",  "best"};

std::size_t slots_of(Strategy s, std::size_t events, std::size_t attributes) {
  switch (s) {
    case Strategy::Global: return 1;
    case Strategy::PerAttribute: return attributes;
    case Strategy::PerEvent: return events;
    case Strategy::PerEventAttribute: return events * attributes;
  }
  return 0;
}

}  // namespace

std::string_view to_string(Strategy s) { return kStrategyNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(Heuristic h) { return kHeuristicNames[static_cast<std::size_t>(h)]; }

Strategy strategy_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kStrategyNames.size(); ++i) {
    if (name == kStrategyNames[i] || name == kStrategyShort[i]) return static_cast<Strategy>(i);
  }
  throw ParseError("unknown threshold strategy '" + std::string(name) + "'");
}

Heuristic heuristic_from_string(std::string_view name) {
  std::string normalized(name);
  std::replace(normalized.begin(), normalized.end(), '-', '_');
  for (std::size_t i = 0; i < kHeuristicNames.size(); ++i) {
    if (normalized == kHeuristicNames[i]) return static_cast<Heuristic>(i);
  }
  throw ParseError("unknown heuristic '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

double ThresholdAssignment::at(std::size_t j, std::size_t k) const {
  switch (strategy) {
    case Strategy::Global: return values[0];
    case Strategy::PerAttribute: return values[k];
    case Strategy::PerEvent: return values[j];
    case Strategy::PerEventAttribute: return values[j * attributes + k];
  }
  return 1.0;
}

ThresholdAssignment ThresholdAssignment::global(double tau, std::size_t events, std::size_t attributes) {
  return {Strategy::Global, events, attributes, {tau}};
}

std::string assignment_to_json(const ThresholdAssignment& a) {
  nlohmann::ordered_json j;
  j["strategy"] = to_string(a.strategy);
  j["events"] = a.events;
  j["attributes"] = a.attributes;
  if (a.strategy == Strategy::Global) {
    j["values"] = a.values.at(0);
  } else if (a.strategy == Strategy::PerEventAttribute) {
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t e = 0; e < a.events; ++e) {
      rows.push_back(std::vector<double>(a.values.begin() + static_cast<std::ptrdiff_t>(e * a.attributes),
                                         a.values.begin() + static_cast<std::ptrdiff_t>((e + 1) * a.attributes)));
    }
    j["values"] = rows;
  } else {
    j["values"] = a.values;
  }
  return j.dump(1);
}

ThresholdAssignment assignment_from_json(std::string_view json_text) {
  const auto j = detail::parse_json(json_text, "threshold assignment");
  try {
    ThresholdAssignment a;
    a.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    a.events = j.at("events").get<std::size_t>();
    a.attributes = j.at("attributes").get<std::size_t>();
    const auto& values = j.at("values");
    if (a.strategy == Strategy::Global) {
      a.values = {values.get<double>()};
    } else if (a.strategy == Strategy::PerEventAttribute) {
      for (const auto& row : values) {
        for (const auto& v : row) a.values.push_back(v.get<double>());
      }
    } else {
      a.values = values.get<std::vector<double>>();
    }
    if (a.values.size() != slots_of(a.strategy, a.events, a.attributes)) {
      throw ParseError("threshold assignment: wrong number of values");
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("threshold assignment: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

FlagTensor theta(const ScoreTensor& scores, const ThresholdAssignment& assignment) {
  const std::size_t E = scores.max_events(), A = scores.num_attributes();
  if (assignment.values.size() != slots_of(assignment.strategy, E, A) ||
      (assignment.strategy != Strategy::Global && assignment.strategy != Strategy::PerAttribute &&
       assignment.events != E) ||
      (assignment.strategy != Strategy::Global && assignment.strategy != Strategy::PerEvent &&
       assignment.attributes != A)) {
    throw PreconditionError("theta: threshold assignment does not match the score tensor");
  }
  FlagTensor flags(scores.case_lengths(), E, A, 0);
  for (std::size_t i = 0; i < scores.num_cases(); ++i) {
    for (std::size_t j = 0; j < scores.case_length(i); ++j) {
      for (std::size_t k = 0; k < A; ++k) flags(i, j, k) = scores(i, j, k) > assignment.at(j, k) ? 1 : 0;
    }
  }
  return flags;
}

FlagTensor theta(const ScoreTensor& scores, double tau) {
  return theta(scores, ThresholdAssignment::global(tau, scores.max_events(), scores.num_attributes()));
}

double anomaly_ratio(const ScoreTensor& scores, double tau) {
  std::size_t flagged = 0, slots = 0;
  for (std::size_t i = 0; i < scores.num_cases(); ++i) {
    for (std::size_t j = 0; j < scores.case_length(i); ++j) {
      for (std::size_t k = 0; k < scores.num_attributes(); ++k) {
        ++slots;
        if (scores(i, j, k) > tau) ++flagged;
      }
    }
  }
  return slots == 0 ? 0.0 : static_cast<double>(flagged) / static_cast<double>(slots);
}

std::vector<double> candidate_thresholds(std::span<const double> scores, std::size_t cap) {
  std::vector<double> distinct(scores.begin(), scores.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (cap >= 2 && distinct.size() > cap) {
    std::vector<double> thinned;
    thinned.reserve(cap);
    const std::size_t n = distinct.size();
    for (std::size_t i = 0; i < cap; ++i) thinned.push_back(distinct[i * (n - 1) / (cap - 1)]);
    distinct = std::move(thinned);
  }
  return distinct;
}

void ratio_derivatives(RatioCurve& c) {
  const std::size_t n = c.tau.size();
  if (n < 3 || c.r.size() != n) throw PreconditionError("ratio_derivatives: need at least 3 candidates");
  c.first.assign(n, 0.0);
  c.second.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) c.first[i] = (c.r[i + 1] - c.r[i]) / (c.tau[i + 1] - c.tau[i]);
  c.first[n - 1] = c.first[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double right = (c.r[i + 1] - c.r[i]) / (c.tau[i + 1] - c.tau[i]);
    const double left = (c.r[i] - c.r[i - 1]) / (c.tau[i] - c.tau[i - 1]);
    c.second[i] = 2.0 * (right - left) / (c.tau[i + 1] - c.tau[i - 1]);
  }
  c.second[0] = c.second[1];
  c.second[n - 1] = c.second[n - 2];
}

std::vector<double> curve_thresholds(std::span<const double> scores, std::size_t points) {
  std::vector<double> distinct = candidate_thresholds(scores, 0);
  if (points < 2 || distinct.size() <= points) return distinct;
  const double lo = distinct.front(), hi = distinct.back();
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  grid.back() = hi;
  return grid;
}

RatioCurve ratio_curve(std::span<const double> scores, std::size_t points) {
  RatioCurve curve;
  curve.tau = curve_thresholds(scores, points);
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  for (double tau : curve.tau) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), tau);
    curve.r.push_back(static_cast<double>(above) / n);
  }
  if (curve.tau.size() >= 3) ratio_derivatives(curve);
  return curve;
}

std::vector<Plateau> find_plateaus(const RatioCurve& c) {
  const std::size_t n = c.tau.size();
  if (n == 0 || c.first.size() != n) throw PreconditionError("find_plateaus: derivatives missing");
  if (n == 1) return {Plateau{0, 0, c.r[0]}};
  double mean_slope = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) mean_slope += std::abs(c.first[i]);
  mean_slope /= static_cast<double>(n - 1);
  const double eps = 2.0 * mean_slope;

  auto level = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t i = a; i <= b; ++i) s += c.r[i];
    return s / static_cast<double>(b - a + 1);
  };
  std::vector<Plateau> plateaus;
  if (eps == 0.0) {
    plateaus.push_back({0, n - 1, level(0, n - 1)});
    return plateaus;
  }
  for (std::size_t i = 0; i < n;) {
    if (std::abs(c.first[i]) < eps) {
      std::size_t j = i;
      while (j + 1 < n && std::abs(c.first[j + 1]) < eps) ++j;
      plateaus.push_back({i, j, level(i, j)});
      i = j + 1;
    } else {
      ++i;
    }
  }
  if (plateaus.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (std::abs(c.first[i]) < std::abs(c.first[best])) best = i;
    }
    plateaus.push_back({best, best, c.r[best]});
  }
  return plateaus;
}

Plateau lowest_plateau(const RatioCurve& curve) {
  const auto plateaus = find_plateaus(curve);
  Plateau lowest = plateaus.front();
  for (const auto& p : plateaus) {
    if (p.level < lowest.level) lowest = p;
  }
  return lowest;
}

double f1_at(std::span<const double> scores, std::span<const std::uint8_t> truth, double tau) {
  BinaryCounts counts;
  for (std::size_t n = 0; n < scores.size(); ++n) {
    const bool p = scores[n] > tau, t = truth[n] != 0;
    if (p && t) ++counts.tp;
    else if (p) ++counts.fp;
    else if (t) ++counts.fn;
  }
  return counts.f1();
}

namespace {

double best_threshold(std::span<const double> scores, std::span<const std::uint8_t> truth, std::size_t cap) {
  if (truth.size() != scores.size()) throw PreconditionError("best heuristic requires one label per score");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> sorted(scores.size());
  // positives_below[m] = anomalies among the m smallest scores.
  std::vector<std::size_t> positives_below(scores.size() + 1, 0);
  for (std::size_t m = 0; m < order.size(); ++m) {
    sorted[m] = scores[order[m]];
    positives_below[m + 1] = positives_below[m] + (truth[order[m]] != 0 ? 1 : 0);
  }
  const std::size_t positives = positives_below.back();
  const auto candidates = candidate_thresholds(scores, cap);
  double best_tau = candidates.front();
  double best_f1 = -1.0;
  for (double tau : candidates) {
    const auto below = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), tau) - sorted.begin());
    const std::size_t flagged = sorted.size() - below;
    const std::size_t tp = positives - positives_below[below];
    const double f1 = flagged + positives == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(flagged + positives);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_tau = tau;
    }
  }
  return best_tau;
}

}  // namespace

double select_threshold(Heuristic heuristic, std::span<const double> scores, std::span<const std::uint8_t> truth,
                        std::size_t cap, std::size_t curve_points) {
  if (heuristic == Heuristic::Best && truth.empty() && !scores.empty()) {
    throw PreconditionError("the best heuristic requires ground-truth labels");
  }
  if (scores.empty()) return 1.0;
  if (heuristic == Heuristic::Best) return best_threshold(scores, truth, cap);

  const RatioCurve curve = ratio_curve(scores, curve_points);
  const std::size_t n = curve.tau.size();
  if (n < 3) return curve.tau.back();
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  // Largest score <= tau; tau never lies below the smallest score.
  auto snap = [&](double tau) { return *(std::upper_bound(sorted.begin(), sorted.end(), tau) - 1); };
  switch (heuristic) {
    case Heuristic::LpLeft: return snap(curve.tau[lowest_plateau(curve).first]);
    case Heuristic::LpRight: return snap(curve.tau[lowest_plateau(curve).last]);
    case Heuristic::LpCenter: {
      const Plateau p = lowest_plateau(curve);
      double sum = 0.0;
      for (std::size_t i = p.first; i <= p.last; ++i) sum += curve.tau[i];
      return sum / static_cast<double>(p.last - p.first + 1);
    }
    case Heuristic::ElbowDown:
    case Heuristic::ElbowUp: {
      std::size_t pick = 1;
      for (std::size_t i = 2; i + 1 < n; ++i) {
        const bool better = heuristic == Heuristic::ElbowDown ? curve.second[i] > curve.second[pick]
                                                              : curve.second[i] < curve.second[pick];
        if (better) pick = i;
      }
      return snap(curve.tau[pick]);
    }
    case Heuristic::Best: break;
  }
  return 1.0;
}

CrossSection cross_section(const ScoreTensor& scores, const FlagTensor* truth, std::optional<std::size_t> event,
                           std::optional<std::size_t> attribute) {
  CrossSection section;
  for (std::size_t i = 0; i < scores.num_cases(); ++i) {
    const std::size_t length = scores.case_length(i);
    const std::size_t j_begin = event ? *event : 0;
    const std::size_t j_end = event ? std::min(*event + 1, length) : length;
    for (std::size_t j = j_begin; j < j_end; ++j) {
      const std::size_t k_begin = attribute ? *attribute : 0;
      const std::size_t k_end = attribute ? *attribute + 1 : scores.num_attributes();
      for (std::size_t k = k_begin; k < k_end; ++k) {
        section.scores.push_back(scores(i, j, k));
        if (truth) section.truth.push_back((*truth)(i, j, k));
      }
    }
  }
  return section;
}

ThresholdAssignment apply_strategy(Heuristic heuristic, Strategy strategy, const ScoreTensor& scores,
                                   const FlagTensor* truth, std::size_t cap, std::size_t curve_points) {
  if (heuristic == Heuristic::Best && !truth) throw PreconditionError("the best heuristic requires ground-truth labels");
  if (truth && !scores.same_shape(*truth)) throw PreconditionError("apply_strategy: label tensor shape mismatch");
  const std::size_t E = scores.max_events(), A = scores.num_attributes();
  ThresholdAssignment a{strategy, E, A, {}};
  auto select = [&](std::optional<std::size_t> event, std::optional<std::size_t> attribute) {
    const CrossSection s = cross_section(scores, truth, event, attribute);
    return select_threshold(heuristic, s.scores, s.truth, cap, curve_points);
  };
  switch (strategy) {
    case Strategy::Global: a.values.push_back(select(std::nullopt, std::nullopt)); break;
    case Strategy::PerAttribute:
      for (std::size_t k = 0; k < A; ++k) a.values.push_back(select(std::nullopt, k));
      break;
    case Strategy::PerEvent:
      for (std::size_t j = 0; j < E; ++j) a.values.push_back(select(j, std::nullopt));
      break;
    case Strategy::PerEventAttribute:
      for (std::size_t j = 0; j < E; ++j) {
        for (std::size_t k = 0; k < A; ++k) a.values.push_back(select(j, k));
      }
      break;
  }
  return a;
}

}  // namespace binet
