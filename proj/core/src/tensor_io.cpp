#include "binet/tensor_io.hpp"

#include "binet/errors.hpp"
#include "io_util.hpp"

namespace binet {

namespace {

using nlohmann::ordered_json;

template <class T>
std::string to_json(const SlotTensor<T>& t, const char* kind) {
  ordered_json root;
  root["kind"] = kind;
  root["max_events"] = t.max_events();
  root["attributes"] = t.num_attributes();
  root["case_lengths"] = t.case_lengths();
  ordered_json cases = ordered_json::array();
  for (std::size_t i = 0; i < t.num_cases(); ++i) {
    ordered_json events = ordered_json::array();
    for (std::size_t j = 0; j < t.case_length(i); ++j) {
      ordered_json slots = ordered_json::array();
      for (std::size_t k = 0; k < t.num_attributes(); ++k) slots.push_back(t(i, j, k));
      events.push_back(std::move(slots));
    }
    cases.push_back(std::move(events));
  }
  root["values"] = std::move(cases);
  return root.dump() + "\n";
}

template <class T>
SlotTensor<T> from_json(std::string_view text, const char* kind) {
  const ordered_json root = detail::parse_json(text, kind);
  try {
    if (root.at("kind").get<std::string>() != kind) {
      throw ParseError(std::string("expected a '") + kind + "' file, found '" + root.at("kind").get<std::string>() + "'");
    }
    const auto E = root.at("max_events").get<std::size_t>();
    const auto A = root.at("attributes").get<std::size_t>();
    auto lengths = root.at("case_lengths").get<std::vector<std::size_t>>();
    const auto& values = root.at("values");
    if (values.size() != lengths.size()) throw ParseError(std::string(kind) + ": case count mismatch");
    SlotTensor<T> t(lengths, E, A);
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (lengths[i] > E || values[i].size() != lengths[i]) throw ParseError(std::string(kind) + ": bad case length");
      for (std::size_t j = 0; j < lengths[i]; ++j) {
        if (values[i][j].size() != A) throw ParseError(std::string(kind) + ": bad attribute count");
        for (std::size_t k = 0; k < A; ++k) t(i, j, k) = values[i][j][k].get<T>();
      }
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(kind) + ": " + e.what());
  }
}

}  // namespace

std::string scores_to_json(const ScoreTensor& scores) { return to_json(scores, "scores"); }
std::string flags_to_json(const FlagTensor& flags) { return to_json(flags, "flags"); }
std::string predictions_to_json(const PredictionSets& predictions) { return to_json(predictions, "predictions"); }

ScoreTensor scores_from_json(std::string_view text) { return from_json<double>(text, "scores"); }

FlagTensor flags_from_json(std::string_view text) {
  FlagTensor flags = from_json<std::uint8_t>(text, "flags");
  for (auto v : flags.data()) {
    if (v > 1) throw ParseError("flags: values must be 0 or 1");
  }
  return flags;
}

PredictionSets predictions_from_json(std::string_view text) {
  return from_json<std::vector<std::string>>(text, "predictions");
}

ScoreTensor load_scores(const std::filesystem::path& path) { return scores_from_json(detail::read_file(path)); }
FlagTensor load_flags(const std::filesystem::path& path) { return flags_from_json(detail::read_file(path)); }
PredictionSets load_predictions(const std::filesystem::path& path) {
  return predictions_from_json(detail::read_file(path));
}

}  // namespace binet
