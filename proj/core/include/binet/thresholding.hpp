#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "binet/scores.hpp"

namespace binet {

/// Anomaly score of an observed value: the total probability strictly above p_v.
/// Throws NumericError unless `p` is a distribution (entries in [0, 1], sum 1 +- 1e-6).
double sigma(std::span<const double> p, double p_v);
/// Same without validation (hot path inside scoring loops).
double sigma_unchecked(std::span<const double> p, double p_v) noexcept;

enum class Strategy { Global, PerAttribute, PerEvent, PerEventAttribute };
enum class Heuristic { LpLeft, LpCenter, LpRight, ElbowDown, ElbowUp, Best };

std::string_view to_string(Strategy s);
std::string_view to_string(Heuristic h);
/// Accepts the names used by to_string and the CLI spellings
/// ("global", "attr", "event", "event-attr"; "lp-left", ..., "best").
Strategy strategy_from_string(std::string_view name);
Heuristic heuristic_from_string(std::string_view name);

/// Thresholds for one strategy: 1 value (global), A (per attribute),
/// E' (per event position) or E' x A (row-major, per event position and attribute).
struct ThresholdAssignment {
  Strategy strategy = Strategy::Global;
  std::size_t events = 0;
  std::size_t attributes = 0;
  std::vector<double> values;

  /// Threshold applying to event position j, attribute k.
  double at(std::size_t j, std::size_t k) const;
  static ThresholdAssignment global(double tau, std::size_t events, std::size_t attributes);

  bool operator==(const ThresholdAssignment&) const = default;
};

std::string assignment_to_json(const ThresholdAssignment& assignment);
ThresholdAssignment assignment_from_json(std::string_view json_text);

/// Y = 1 where S strictly exceeds the applicable threshold. Throws
/// PreconditionError when the assignment does not match the tensor's shape.
FlagTensor theta(const ScoreTensor& scores, const ThresholdAssignment& assignment);
FlagTensor theta(const ScoreTensor& scores, double tau);

/// Fraction of flagged slots among non-padding slots.
double anomaly_ratio(const ScoreTensor& scores, double tau);

/// Distinct values of `scores` in ascending order. More than `cap` distinct
/// values are thinned to `cap` evenly spaced ones (both extremes kept); a cap
/// below 2 keeps them all.
std::vector<double> candidate_thresholds(std::span<const double> scores, std::size_t cap = 10000);

struct RatioCurve {
  std::vector<double> tau;
  std::vector<double> r;
  std::vector<double> first;   // r'
  std::vector<double> second;  // r''
};

/// r' is the forward difference (the last entry repeats the previous one); r''
/// the three-point central difference on the non-uniform grid, with the
/// endpoints copying their neighbor. Throws PreconditionError for < 3 points.
void ratio_derivatives(RatioCurve& curve);

/// Number of points on which the anomaly-ratio curve is sampled once a
/// cross-section has more distinct scores than that.
inline constexpr std::size_t kCurvePoints = 100;

/// Sampling points of the ratio curve: the distinct scores when there are at
/// most `points` of them, otherwise `points` evenly spaced values from the
/// smallest to the largest score. Adjacent distinct scores are too close for
/// a finite-difference slope to be more than noise.
std::vector<double> curve_thresholds(std::span<const double> scores, std::size_t points = kCurvePoints);

/// r(tau) at every curve threshold of the cross-section, plus derivatives
/// when at least 3 points exist.
RatioCurve ratio_curve(std::span<const double> scores, std::size_t points = kCurvePoints);

struct Plateau {
  std::size_t first;  // candidate indices, inclusive
  std::size_t last;
  double level;       // mean r over the plateau
};

/// Maximal runs of candidates with |r'| < eps, eps = 2 * mean |r'|. A constant
/// curve (eps = 0) is one plateau; when no candidate qualifies, the single
/// candidate with the smallest |r'| forms the plateau.
std::vector<Plateau> find_plateaus(const RatioCurve& curve);
/// The plateau with the smallest level (first on ties).
Plateau lowest_plateau(const RatioCurve& curve);

/// Threshold chosen by `heuristic` on one cross-section. `truth` (1 = anomalous,
/// parallel to `scores`) is required for Best, which scans the (capped)
/// distinct scores. The other heuristics work on ratio_curve(scores,
/// curve_points); lp_left, lp_right and the elbows are snapped down to the
/// largest score not above the chosen point, which flags the same slots. With
/// fewer than 3 curve points they return the largest score. Empty input yields 1.
double select_threshold(Heuristic heuristic, std::span<const double> scores,
                        std::span<const std::uint8_t> truth = {}, std::size_t cap = 10000,
                        std::size_t curve_points = kCurvePoints);

/// F1 at threshold tau on one cross-section.
double f1_at(std::span<const double> scores, std::span<const std::uint8_t> truth, double tau);

/// Applies the heuristic to every cross-section of the strategy (padding excluded).
/// `truth` is required for Best; empty cross-sections get tau = 1.
ThresholdAssignment apply_strategy(Heuristic heuristic, Strategy strategy, const ScoreTensor& scores,
                                   const FlagTensor* truth = nullptr, std::size_t cap = 10000,
                                   std::size_t curve_points = kCurvePoints);

/// Values and (optionally) truth flags of one cross-section: `event` and
/// `attribute` select a slice, std::nullopt means "all".
struct CrossSection {
  std::vector<double> scores;
  std::vector<std::uint8_t> truth;
};
CrossSection cross_section(const ScoreTensor& scores, const FlagTensor* truth, std::optional<std::size_t> event,
                           std::optional<std::size_t> attribute);

}  // namespace binet
