#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "binet/errors.hpp"
#include "binet/random.hpp"
#include "binet/thresholding.hpp"

using namespace binet;

namespace {

// Distribution with entries that are multiples of 1/1024, so every partial
// sum is exact and the order of summation cannot matter.
std::vector<double> dyadic_distribution(Rng& rng, std::size_t n) {
  std::vector<std::size_t> cuts = {0, 1024};
  for (std::size_t i = 0; i + 1 < n; ++i) cuts.push_back(uniform_between(rng, 0, 1024));
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> p;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) p.push_back(static_cast<double>(cuts[i + 1] - cuts[i]) / 1024.0);
  return p;
}

double brute_sigma(const std::vector<double>& p, double p_v) {
  std::vector<double> sorted = p;
  std::sort(sorted.rbegin(), sorted.rend());
  double s = 0.0;
  for (double q : sorted) {
    if (q > p_v) s += q;
  }
  return s;
}

ScoreTensor random_scores(Rng& rng, std::size_t cases, std::size_t max_events, std::size_t attributes,
                          std::size_t levels = 0) {
  std::vector<std::size_t> lengths;
  for (std::size_t i = 0; i < cases; ++i) lengths.push_back(uniform_between(rng, 1, max_events));
  ScoreTensor s(lengths, max_events, attributes);
  for (std::size_t i = 0; i < cases; ++i) {
    for (std::size_t j = 0; j < lengths[i]; ++j) {
      for (std::size_t k = 0; k < attributes; ++k) {
        const double u = uniform01(rng);
        s(i, j, k) = levels ? std::floor(u * static_cast<double>(levels)) / static_cast<double>(levels) : u;
      }
    }
  }
  return s;
}

// Two plateaus: the lower one spans candidates 5..10 (see the fixture notes below).
const std::vector<double> kTwoPlateaus = [] {
  std::vector<double> s(20, 0.0);
  for (double v : {0.1, 0.2, 0.3, 0.4}) s.push_back(v);
  for (int n = 0; n < 6; ++n) s.push_back(0.45);
  for (double v : {0.5, 0.6, 0.7, 0.8, 1.0, 1.0}) s.push_back(v);
  return s;
}();

}  // namespace

TEST(Sigma, MatchesStrictSumOracle) {
  Rng rng(1);
  for (int n = 0; n < 1000; ++n) {
    const auto p = dyadic_distribution(rng, 2 + uniform_index(rng, 20));
    const double max = *std::max_element(p.begin(), p.end());
    for (double p_v : p) {
      const double s = sigma(p, p_v);
      EXPECT_EQ(s, brute_sigma(p, p_v));
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0 - p_v);
      if (p_v == max) { EXPECT_EQ(s, 0.0); }
    }
  }
}

TEST(Sigma, TiesDoNotCount) {
  const std::vector<double> p = {0.25, 0.25, 0.5};
  EXPECT_EQ(sigma(p, 0.25), 0.5);
  EXPECT_EQ(sigma(p, 0.5), 0.0);
  EXPECT_EQ(sigma(p, 0.0), 1.0);
}

TEST(Sigma, MonotoneInObservedProbability) {
  Rng rng(2);
  for (int n = 0; n < 300; ++n) {
    std::vector<double> p = dyadic_distribution(rng, 6);
    const std::size_t v = uniform_index(rng, p.size());
    const double before = sigma_unchecked(p, p[v]);
    const double raised = std::min(1.0, p[v] + 0.1);
    const double rest = 1.0 - p[v];
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i != v) p[i] = rest > 0.0 ? p[i] * (1.0 - raised) / rest : 0.0;
    }
    p[v] = raised;
    EXPECT_LE(sigma_unchecked(p, p[v]), before + 1e-12);
  }
}

TEST(Sigma, ValidatesDistributions) {
  EXPECT_THROW(sigma(std::vector<double>{0.5, 0.6}, 0.5), NumericError);
  EXPECT_THROW(sigma(std::vector<double>{-0.1, 1.1}, 0.5), NumericError);
  EXPECT_THROW(sigma(std::vector<double>{std::nan(""), 1.0}, 0.5), NumericError);
  EXPECT_THROW(sigma(std::vector<double>{0.5, 0.5}, 2.0), NumericError);
}

TEST(Names, StrategiesAndHeuristics) {
  for (auto s : {Strategy::Global, Strategy::PerAttribute, Strategy::PerEvent, Strategy::PerEventAttribute}) {
    EXPECT_EQ(strategy_from_string(to_string(s)), s);
  }
  EXPECT_EQ(strategy_from_string("attr"), Strategy::PerAttribute);
  EXPECT_EQ(strategy_from_string("event-attr"), Strategy::PerEventAttribute);
  for (auto h : {Heuristic::LpLeft, Heuristic::LpCenter, Heuristic::LpRight, Heuristic::ElbowDown,
                 Heuristic::ElbowUp, Heuristic::Best}) {
    EXPECT_EQ(heuristic_from_string(to_string(h)), h);
  }
  EXPECT_EQ(heuristic_from_string("lp-center"), Heuristic::LpCenter);
  EXPECT_THROW(heuristic_from_string("knee"), ParseError);
  EXPECT_THROW(strategy_from_string("case"), ParseError);
}

TEST(Theta, StrictComparisonAndMonotonicity) {
  Rng rng(3);
  const ScoreTensor s = random_scores(rng, 30, 6, 2, 10);
  FlagTensor previous = theta(s, -1.0);
  for (std::size_t i = 0; i < s.num_cases(); ++i) {
    for (std::size_t j = 0; j < s.max_events(); ++j) {
      for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(previous(i, j, k), s.is_padding(i, j) ? 0 : 1);
    }
  }
  for (double tau = 0.0; tau <= 1.0; tau += 0.05) {
    const FlagTensor flags = theta(s, tau);
    for (std::size_t n = 0; n < flags.data().size(); ++n) {
      EXPECT_LE(flags.data()[n], previous.data()[n]);
      EXPECT_EQ(flags.data()[n], s.data()[n] > tau ? 1 : 0);
    }
    previous = flags;
  }
  const ThresholdAssignment wrong{Strategy::PerAttribute, 6, 3, {0.1, 0.2, 0.3}};
  EXPECT_THROW(theta(s, wrong), PreconditionError);
}

TEST(Theta, ComponentwiseMonotonicity) {
  Rng rng(4);
  const ScoreTensor s = random_scores(rng, 20, 5, 3);
  for (int n = 0; n < 50; ++n) {
    ThresholdAssignment a{Strategy::PerEventAttribute, 5, 3, {}}, b = a;
    for (std::size_t x = 0; x < 15; ++x) {
      a.values.push_back(uniform01(rng));
      b.values.push_back(a.values.back() + uniform01(rng) * 0.3);
    }
    const FlagTensor fa = theta(s, a), fb = theta(s, b);
    for (std::size_t m = 0; m < fa.data().size(); ++m) EXPECT_GE(fa.data()[m], fb.data()[m]);
  }
}

TEST(AnomalyRatio, BoundaryValuesAndMonotone) {
  Rng rng(5);
  const ScoreTensor s = random_scores(rng, 40, 7, 2);
  double lo = 1.0, hi = 0.0;
  for (std::size_t i = 0; i < s.num_cases(); ++i) {
    for (std::size_t j = 0; j < s.case_length(i); ++j) {
      lo = std::min({lo, s(i, j, 0), s(i, j, 1)});
      hi = std::max({hi, s(i, j, 0), s(i, j, 1)});
    }
  }
  EXPECT_EQ(anomaly_ratio(s, lo - 1e-9), 1.0);
  EXPECT_EQ(anomaly_ratio(s, hi), 0.0);
  double previous = 1.0;
  for (double tau = lo; tau <= hi; tau += 0.01) {
    const double r = anomaly_ratio(s, tau);
    EXPECT_LE(r, previous);
    previous = r;
  }
}

TEST(Candidates, DistinctSortedAndCapped) {
  const std::vector<double> s = {0.5, 0.1, 0.5, 0.3, 0.1};
  EXPECT_EQ(candidate_thresholds(s), (std::vector<double>{0.1, 0.3, 0.5}));
  std::vector<double> many;
  for (int i = 0; i < 1000; ++i) many.push_back(i / 1000.0);
  const auto capped = candidate_thresholds(many, 10);
  ASSERT_EQ(capped.size(), 10u);
  EXPECT_EQ(capped.front(), 0.0);
  EXPECT_EQ(capped.back(), 0.999);
  EXPECT_TRUE(std::is_sorted(capped.begin(), capped.end()));
  EXPECT_EQ(candidate_thresholds(many, 0).size(), 1000u);
  EXPECT_EQ(candidate_thresholds(many, 1).size(), 1000u);
}

TEST(Curve, ThresholdGrid) {
  std::vector<double> many;
  for (int i = 0; i < 500; ++i) many.push_back(0.2 + 0.6 * i / 499.0);
  const auto grid = curve_thresholds(many, 100);
  ASSERT_EQ(grid.size(), 100u);
  EXPECT_EQ(grid.front(), 0.2);
  EXPECT_EQ(grid.back(), many.back());
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_NEAR(grid[i] - grid[i - 1], 0.6 / 99.0, 1e-12);
  const std::vector<double> few = {0.3, 0.1, 0.2};
  EXPECT_EQ(curve_thresholds(few, 100), (std::vector<double>{0.1, 0.2, 0.3}));
}

TEST(Curve, HandComputedDerivatives) {
  RatioCurve c;
  c.tau = {0.0, 0.25, 0.5, 0.75, 1.0};
  c.r = {1.0, 0.75, 0.75, 0.75, 0.5};
  ratio_derivatives(c);
  const std::vector<double> first = {-1.0, 0.0, 0.0, -1.0, -1.0};
  const std::vector<double> second = {4.0, 4.0, 0.0, -4.0, -4.0};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(c.first[i], first[i]) << i;
    EXPECT_EQ(c.second[i], second[i]) << i;
  }
  // eps = 2 * mean(|r'|) over the four differences = 1: only the flat middle qualifies.
  const auto plateaus = find_plateaus(c);
  ASSERT_EQ(plateaus.size(), 1u);
  EXPECT_EQ(plateaus[0].first, 1u);
  EXPECT_EQ(plateaus[0].last, 2u);
  EXPECT_EQ(plateaus[0].level, 0.75);

  RatioCurve two;
  two.tau = {0.0, 1.0};
  two.r = {1.0, 0.0};
  EXPECT_THROW(ratio_derivatives(two), PreconditionError);
}

TEST(Curve, NonUniformSecondDerivative) {
  // r = tau^2 has r'' = 2 everywhere for the three-point formula on any grid.
  RatioCurve c;
  c.tau = {0.0, 0.1, 0.35, 0.5, 0.9};
  for (double t : c.tau) c.r.push_back(t * t);
  ratio_derivatives(c);
  for (double v : c.second) EXPECT_NEAR(v, 2.0, 1e-12);
}

TEST(Plateaus, DegenerateCases) {
  RatioCurve flat;
  flat.tau = {0.0, 0.5, 1.0};
  flat.r = {0.3, 0.3, 0.3};
  ratio_derivatives(flat);
  auto p = find_plateaus(flat);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].first, 0u);
  EXPECT_EQ(p[0].last, 2u);

  // Equal slopes: |r'| = mean < eps, so the whole line is one plateau.
  RatioCurve line;
  line.tau = {0.0, 0.25, 0.5, 0.75};
  line.r = {1.0, 0.75, 0.5, 0.25};
  ratio_derivatives(line);
  p = find_plateaus(line);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].last, 3u);

  RatioCurve single;
  single.tau = {0.5};
  single.r = {0.25};
  single.first = {0.0};
  single.second = {0.0};
  p = find_plateaus(single);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].first, 0u);
  EXPECT_EQ(p[0].level, 0.25);
}

TEST(Heuristics, TwoPlateauFixture) {
  // Distinct scores: 0, .1, .2, .3, .4, .45, .5, .6, .7, .8, 1 with r' = -5/18 except
  // a steep step at .4 -> .45 (six slots at .45). Plateaus: candidates 0..3 (mean r
  // 0.403) and 5..10 (mean r 0.093). r'' peaks at .45 and bottoms at .4.
  const auto& s = kTwoPlateaus;
  const RatioCurve curve = ratio_curve(s);
  ASSERT_EQ(curve.tau.size(), 11u);
  const auto plateaus = find_plateaus(curve);
  ASSERT_EQ(plateaus.size(), 2u);
  EXPECT_EQ(plateaus[1].first, 5u);
  EXPECT_EQ(plateaus[1].last, 10u);
  EXPECT_NEAR(plateaus[1].level, (6.0 + 5 + 4 + 3 + 2 + 0) / 36.0 / 6.0, 1e-12);
  EXPECT_EQ(select_threshold(Heuristic::LpLeft, s), 0.45);
  EXPECT_EQ(select_threshold(Heuristic::LpRight, s), 1.0);
  EXPECT_NEAR(select_threshold(Heuristic::LpCenter, s), (0.45 + 0.5 + 0.6 + 0.7 + 0.8 + 1.0) / 6.0, 1e-12);
  EXPECT_EQ(select_threshold(Heuristic::ElbowDown, s), 0.45);
  EXPECT_EQ(select_threshold(Heuristic::ElbowUp, s), 0.4);
}

TEST(Heuristics, SmallAndEmptyInputs) {
  EXPECT_EQ(select_threshold(Heuristic::LpCenter, std::vector<double>{}), 1.0);
  EXPECT_EQ(select_threshold(Heuristic::LpLeft, std::vector<double>{0.2, 0.7, 0.2}), 0.7);
  EXPECT_EQ(select_threshold(Heuristic::ElbowUp, std::vector<double>{0.4}), 0.4);
  EXPECT_THROW(select_threshold(Heuristic::Best, std::vector<double>{0.4, 0.5}), PreconditionError);
}

TEST(Heuristics, MembershipAndSnapping) {
  Rng rng(6);
  for (int n = 0; n < 40; ++n) {
    std::vector<double> s;
    const std::size_t count = 50 + uniform_index(rng, 400);
    for (std::size_t i = 0; i < count; ++i) s.push_back(std::pow(uniform01(rng), 3.0));
    const std::set<double> members(s.begin(), s.end());
    const RatioCurve curve = ratio_curve(s);
    const Plateau p = lowest_plateau(curve);
    for (Heuristic h : {Heuristic::LpLeft, Heuristic::LpRight, Heuristic::ElbowDown, Heuristic::ElbowUp}) {
      EXPECT_TRUE(members.count(select_threshold(h, s))) << to_string(h);
    }
    const double center = select_threshold(Heuristic::LpCenter, s);
    EXPECT_GE(center, *members.begin());
    EXPECT_LE(center, *members.rbegin());
    // Snapping never changes which slots are flagged.
    const double left = select_threshold(Heuristic::LpLeft, s);
    for (double v : s) EXPECT_EQ(v > left, v > curve.tau[p.first]);
  }
}

TEST(Best, DominatesAndPrefersSmallestTau) {
  Rng rng(7);
  for (int n = 0; n < 50; ++n) {
    std::vector<double> s;
    std::vector<std::uint8_t> t;
    for (int i = 0; i < 300; ++i) {
      const bool anomalous = uniform01(rng) < 0.2;
      t.push_back(anomalous);
      s.push_back(std::min(1.0, uniform01(rng) * 0.7 + (anomalous ? 0.3 : 0.0)));
    }
    const double f_best = f1_at(s, t, select_threshold(Heuristic::Best, s, t));
    for (Heuristic h : {Heuristic::LpLeft, Heuristic::LpCenter, Heuristic::LpRight, Heuristic::ElbowDown,
                        Heuristic::ElbowUp}) {
      EXPECT_GE(f_best, f1_at(s, t, select_threshold(h, s)));
    }
    for (double tau : candidate_thresholds(s)) EXPECT_GE(f_best, f1_at(s, t, tau));
  }
  // tau = 0.1 flags both anomalies and nothing else.
  const std::vector<double> s = {0.1, 0.8, 0.9};
  const std::vector<std::uint8_t> t = {0, 1, 1};
  EXPECT_EQ(select_threshold(Heuristic::Best, s, t), 0.1);
  // tau = 0.2 is the only perfect split.
  const std::vector<double> u = {0.1, 0.2, 0.9, 0.1};
  const std::vector<std::uint8_t> v = {0, 0, 1, 0};
  EXPECT_EQ(select_threshold(Heuristic::Best, u, v), 0.2);
  // Without anomalies every candidate scores 0: the smallest wins.
  EXPECT_EQ(select_threshold(Heuristic::Best, u, std::vector<std::uint8_t>(4, 0)), 0.1);
}

TEST(F1, KnownValues) {
  const std::vector<double> s = {0.1, 0.6, 0.7, 0.9};
  const std::vector<std::uint8_t> t = {1, 0, 1, 1};
  // tau 0.5 flags 3: tp 2, fp 1, fn 1.
  EXPECT_NEAR(f1_at(s, t, 0.5), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(f1_at(s, t, 1.0), 0.0);
  EXPECT_EQ(f1_at(s, std::vector<std::uint8_t>(4, 0), 0.0), 0.0);
}

TEST(Strategy, CrossSectionsAndShapes) {
  Rng rng(8);
  const ScoreTensor s = random_scores(rng, 25, 4, 3);
  FlagTensor truth(s.case_lengths(), 4, 3);
  for (std::size_t n = 0; n < truth.data().size(); ++n) truth.data()[n] = s.data()[n] > 0.8 ? 1 : 0;

  const auto global = apply_strategy(Heuristic::LpCenter, Strategy::Global, s);
  ASSERT_EQ(global.values.size(), 1u);
  const auto all = cross_section(s, nullptr, std::nullopt, std::nullopt);
  EXPECT_EQ(global.values[0], select_threshold(Heuristic::LpCenter, all.scores));

  const auto per_attr = apply_strategy(Heuristic::LpRight, Strategy::PerAttribute, s);
  ASSERT_EQ(per_attr.values.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto section = cross_section(s, nullptr, std::nullopt, k);
    EXPECT_EQ(section.scores.size(), s.num_events());
    EXPECT_EQ(per_attr.values[k], select_threshold(Heuristic::LpRight, section.scores));
  }
  const auto per_event = apply_strategy(Heuristic::Best, Strategy::PerEvent, s, &truth);
  ASSERT_EQ(per_event.values.size(), 4u);
  const auto per_slot = apply_strategy(Heuristic::Best, Strategy::PerEventAttribute, s, &truth);
  ASSERT_EQ(per_slot.values.size(), 12u);
  // truth is itself a threshold at 0.8, so sections holding both classes are reproduced.
  const FlagTensor flags = theta(s, per_slot);
  std::size_t mixed = 0;
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = 0; k < 3; ++k) {
      const auto section = cross_section(s, &truth, j, k);
      const auto positives = std::count(section.truth.begin(), section.truth.end(), 1);
      if (positives == 0 || positives == static_cast<long>(section.truth.size())) continue;
      ++mixed;
      for (std::size_t i = 0; i < s.num_cases(); ++i) {
        if (!s.is_padding(i, j)) { EXPECT_EQ(flags(i, j, k), truth(i, j, k)); }
      }
    }
  }
  EXPECT_GT(mixed, 6u);
  EXPECT_THROW(apply_strategy(Heuristic::Best, Strategy::Global, s), PreconditionError);
}

TEST(Strategy, EmptyCrossSectionsGetOne) {
  ScoreTensor s({1, 1}, 3, 1);
  s(0, 0, 0) = 0.3;
  s(1, 0, 0) = 0.5;
  const auto a = apply_strategy(Heuristic::LpLeft, Strategy::PerEvent, s);
  ASSERT_EQ(a.values.size(), 3u);
  EXPECT_EQ(a.values[1], 1.0);
  EXPECT_EQ(a.values[2], 1.0);
}

TEST(Assignment, JsonRoundTrip) {
  for (auto strategy : {Strategy::Global, Strategy::PerAttribute, Strategy::PerEvent, Strategy::PerEventAttribute}) {
    ThresholdAssignment a{strategy, 3, 2, {}};
    const std::size_t n = strategy == Strategy::Global ? 1 : strategy == Strategy::PerAttribute ? 2
                          : strategy == Strategy::PerEvent ? 3 : 6;
    for (std::size_t i = 0; i < n; ++i) a.values.push_back(0.1 + 0.123456789 * static_cast<double>(i));
    EXPECT_EQ(assignment_from_json(assignment_to_json(a)), a) << to_string(strategy);
    EXPECT_EQ(a.at(2, 1), a.values[strategy == Strategy::Global ? 0 : strategy == Strategy::PerAttribute ? 1
                                    : strategy == Strategy::PerEvent ? 2 : 5]);
  }
  EXPECT_THROW(assignment_from_json(R"({"strategy": "per_attribute", "events": 2, "attributes": 3, "values": [1]})"),
               ParseError);
  EXPECT_THROW(assignment_from_json(R"({"strategy": "everywhere", "events": 1, "attributes": 1, "values": 1})"),
               ParseError);
  EXPECT_THROW(assignment_from_json("{"), ParseError);
}
