#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "binet/errors.hpp"
#include "binet/event_log.hpp"
#include "binet/scores.hpp"
#include "test_support.hpp"

using namespace binet;
using binet::test::ev;
using binet::test::random_log;
using binet::test::trace;

TEST(EventLog, RejectsSchemaViolations) {
  EXPECT_THROW(EventLog("x", {"user"}, {Case{"a", {ev("A")}}}), SchemaError);
  EXPECT_THROW(EventLog("x", {}, {Case{"a", {}}}), SchemaError);
  EXPECT_THROW(EventLog("x", {}, {trace("a", {"A"}), trace("a", {"B"})}), SchemaError);
  Event labeled = ev("A");
  labeled.labels = std::vector<AnomalyLabel>{AnomalyLabel::Normal, AnomalyLabel::Normal};
  EXPECT_THROW(EventLog("x", {}, {Case{"a", {labeled}}}), SchemaError);
  EXPECT_THROW(EventLog("x", {"activity"}, {Case{"a", {ev("A", {"u"})}}}), SchemaError);
}

TEST(EventLog, CountsAndLabels) {
  const EventLog log("x", {}, {trace("a", {"A", "B", "C"}), trace("b", {"A"})});
  EXPECT_EQ(log.num_events(), 4u);
  EXPECT_EQ(log.max_case_length(), 3u);
  EXPECT_EQ(log.num_attributes(), 1u);
  EXPECT_FALSE(log.is_labeled());
  EXPECT_THROW(case_level_labels(log), PreconditionError);
  const EventLog normal = with_normal_labels(log);
  EXPECT_TRUE(normal.is_labeled());
  EXPECT_EQ(case_level_labels(normal), (std::vector<bool>{false, false}));
  EXPECT_EQ(without_labels(normal), log);
  EXPECT_EQ(activity_alphabet(log), (std::vector<std::string>{"A", "B", "C"}));
}

TEST(EventLog, LabelNamesRoundTrip) {
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    const auto label = static_cast<AnomalyLabel>(c);
    EXPECT_EQ(label_from_string(to_string(label)), label);
  }
  EXPECT_THROW(label_from_string("Bogus"), ParseError);
}

TEST(Vocabulary, DenseSortedIndices) {
  const Vocabulary v({"c", "a", "b", "a"});
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.dimension(), 5u);
  EXPECT_EQ(v.index_of("a"), 2);
  EXPECT_EQ(v.index_of("b"), 3);
  EXPECT_EQ(v.index_of("c"), 4);
  EXPECT_EQ(v.symbol(4), "c");
  EXPECT_THROW(v.index_of("d"), VocabularyError);
  EXPECT_THROW(v.symbol(0), CorruptionError);
  EXPECT_THROW(v.symbol(1), CorruptionError);
  EXPECT_THROW(v.symbol(99), CorruptionError);
}

TEST(Encoding, LayoutInvariants) {
  const EventLog log = random_log(100, 6, 2, 4, 11);
  const EncodedLog enc = encode(log);
  ASSERT_EQ(enc.max_length, log.max_case_length() + 1);
  ASSERT_EQ(enc.num_attributes, 3u);
  for (std::size_t i = 0; i < enc.num_cases; ++i) {
    const std::size_t length = enc.case_lengths[i];
    for (std::size_t a = 0; a < enc.num_attributes; ++a) {
      EXPECT_EQ(enc.at(i, 0, a), kBeginOfCaseIndex);
      for (std::size_t e = 1; e <= length; ++e) {
        EXPECT_GE(enc.at(i, e, a), kFirstValueIndex);
        EXPECT_LT(static_cast<std::size_t>(enc.at(i, e, a)), enc.vocabularies[a].dimension());
      }
      for (std::size_t e = length + 1; e < enc.max_length; ++e) EXPECT_EQ(enc.at(i, e, a), kPaddingIndex);
    }
  }
  // Dictionaries are dense: every real index is used somewhere.
  for (std::size_t a = 0; a < enc.num_attributes; ++a) {
    std::vector<bool> seen(enc.vocabularies[a].dimension(), false);
    for (std::size_t i = 0; i < enc.num_cases; ++i) {
      for (std::size_t e = 1; e <= enc.case_lengths[i]; ++e) seen[static_cast<std::size_t>(enc.at(i, e, a))] = true;
    }
    for (std::size_t v = kFirstValueIndex; v < seen.size(); ++v) EXPECT_TRUE(seen[v]) << "attribute " << a;
  }
}

TEST(Encoding, RoundTripOnRandomLogs) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const EventLog log = random_log(100, 5 + seed, seed % 3, 3, seed);
    EXPECT_EQ(decode(encode(log)), log);
    const EventLog labeled = with_normal_labels(log);
    EXPECT_EQ(decode(encode(labeled)), labeled);
  }
}

TEST(Encoding, FixedDictionariesAndPadding) {
  const EventLog log = random_log(20, 4, 1, 3, 3);
  const EncodedLog enc = encode(log);
  const EncodedLog wide = encode(log, enc.vocabularies, enc.max_length + 3);
  EXPECT_EQ(wide.max_length, enc.max_length + 3);
  EXPECT_EQ(decode(wide), log);
  EXPECT_THROW(encode(log, enc.vocabularies, 2), PreconditionError);
  const EventLog other("o", {"attr0"}, {Case{"z", {ev("unseen", {"v0"})}}});
  EXPECT_THROW(encode(other, enc.vocabularies), VocabularyError);
  EXPECT_THROW(encode(EventLog("o", {}, {trace("z", {"act0"})}), enc.vocabularies), SchemaError);
}

TEST(Encoding, DecodeRejectsCorruption) {
  const EventLog log("x", {}, {trace("a", {"A", "B"}), trace("b", {"B"})});
  EncodedLog enc = encode(log);
  EncodedLog bad = enc;
  bad.at(0, 1, 0) = 99;
  EXPECT_THROW(decode(bad), CorruptionError);
  bad = enc;
  bad.at(0, 1, 0) = kBeginOfCaseIndex;
  EXPECT_THROW(decode(bad), CorruptionError);
  bad = enc;
  bad.at(0, 1, 0) = kPaddingIndex;  // hole before a real event
  EXPECT_THROW(decode(bad), CorruptionError);
}

TEST(Encoding, EmptyLogIsRejected) { EXPECT_THROW(encode(EventLog()), PreconditionError); }

TEST(LogJson, RoundTripWithLabels) {
  EventLog log = random_log(10, 3, 2, 3, 5);
  std::vector<Case> cases = log.cases();
  for (auto& c : cases) {
    for (auto& e : c.events) e.labels = std::vector<AnomalyLabel>(3, AnomalyLabel::Normal);
  }
  cases[2].events[0].labels->at(1) = AnomalyLabel::Attribute;
  cases[3].events[0].labels->at(0) = AnomalyLabel::Skip;
  log = EventLog(log.name(), log.attribute_names(), cases);
  EXPECT_EQ(parse_log(log_to_json(log)), log);

  const auto path = std::filesystem::temp_directory_path() / "binet_test_log.json";
  save_log(log, path);
  EXPECT_EQ(load_log(path), log);
  std::filesystem::remove(path);
}

TEST(LogJson, ParseErrors) {
  EXPECT_THROW(parse_log(R"({"name": "x", "attributes": []})"), ParseError);
  EXPECT_THROW(parse_log(R"({"cases": [{"id": "a", "events": [{"activity": 3}]}]})"), ParseError);
  EXPECT_THROW(parse_log(R"({"cases": [{"id": "a", "events": [{"activity": "A", "labels": {"activity": "?"}}]}]})"),
               ParseError);
  try {
    parse_log("{\n  \"cases\": [\n  }");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 0u);
  }
  EXPECT_THROW(load_log("/nonexistent/binet.json"), IoError);
}

TEST(LogJson, SchemaErrorsSurface) {
  EXPECT_THROW(parse_log(R"({"attributes": ["user"], "cases": [{"id": "a", "events": [{"activity": "A",
               "attrs": {"day": "Mon"}}]}]})"),
               Error);
}

TEST(ScoresTensor, LabelTensorAndMask) {
  EventLog log = with_normal_labels(EventLog("x", {"u"}, {Case{"a", {ev("A", {"x"}), ev("B", {"y"})}}}));
  std::vector<Case> cases = log.cases();
  cases[0].events[1].labels->at(1) = AnomalyLabel::Attribute;
  log = EventLog("x", {"u"}, cases);
  const LabelTensor labels = label_tensor(log);
  EXPECT_EQ(labels(0, 1, 1), AnomalyLabel::Attribute);
  const FlagTensor mask = anomaly_mask(labels);
  EXPECT_EQ(std::count(mask.data().begin(), mask.data().end(), 1), 1);
  EXPECT_THROW(label_tensor(without_labels(log)), PreconditionError);
}
