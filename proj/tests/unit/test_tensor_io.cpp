#include <gtest/gtest.h>

#include <random>

#include "binet/errors.hpp"
#include "binet/tensor_io.hpp"

using namespace binet;

namespace {

const std::vector<std::size_t> kLengths = {3, 1, 0, 2};

ScoreTensor random_scores(std::uint64_t seed) {
  ScoreTensor s(kLengths, 4, 2);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < kLengths.size(); ++i) {
    for (std::size_t j = 0; j < kLengths[i]; ++j) {
      for (std::size_t k = 0; k < 2; ++k) s(i, j, k) = u(rng);
    }
  }
  return s;
}

}  // namespace

TEST(TensorIo, RoundTrips) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ScoreTensor s = random_scores(seed);
    EXPECT_EQ(scores_from_json(scores_to_json(s)), s);
    FlagTensor f(kLengths, 4, 2);
    for (std::size_t i = 0; i < f.data().size(); ++i) f.data()[i] = 0;
    f(0, 2, 1) = 1;
    f(3, 0, 0) = 1;
    EXPECT_EQ(flags_from_json(flags_to_json(f)), f);
  }
  PredictionSets p(kLengths, 4, 2);
  p(0, 1, 0) = {"A", "B"};
  p(3, 1, 1) = {"x"};
  EXPECT_EQ(predictions_from_json(predictions_to_json(p)), p);
}

TEST(TensorIo, KindMismatch) {
  const std::string text = scores_to_json(random_scores(1));
  EXPECT_THROW(flags_from_json(text), ParseError);
  EXPECT_THROW(predictions_from_json(text), ParseError);
}

TEST(TensorIo, MalformedInput) {
  EXPECT_THROW(scores_from_json("{"), ParseError);
  EXPECT_THROW(scores_from_json("[]"), ParseError);
  EXPECT_THROW(scores_from_json(R"({"kind":"scores","max_events":2,"attributes":1,"case_lengths":[1],"values":[]})"),
               ParseError);
  EXPECT_THROW(scores_from_json(R"({"kind":"scores","max_events":1,"attributes":1,"case_lengths":[2],"values":[[[0],[0]]]})"),
               ParseError);
  EXPECT_THROW(scores_from_json(R"({"kind":"scores","max_events":2,"attributes":2,"case_lengths":[1],"values":[[[0]]]})"),
               ParseError);
  EXPECT_THROW(scores_from_json(R"({"kind":"scores","max_events":2,"attributes":1,"case_lengths":[1],"values":[[["x"]]]})"),
               ParseError);
  EXPECT_THROW(flags_from_json(R"({"kind":"flags","max_events":1,"attributes":1,"case_lengths":[1],"values":[[[2]]]})"),
               ParseError);
  EXPECT_THROW(load_scores("/nonexistent/scores.json"), IoError);
}
