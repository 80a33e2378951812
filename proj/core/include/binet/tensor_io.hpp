#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "binet/scores.hpp"

namespace binet {

/// JSON files for per-slot tensors:
/// {"kind": ..., "max_events": E, "attributes": A, "case_lengths": [...],
///  "values": [case][event][attribute]}. Only non-padding slots are stored.
std::string scores_to_json(const ScoreTensor& scores);
std::string flags_to_json(const FlagTensor& flags);
std::string predictions_to_json(const PredictionSets& predictions);

/// Throw ParseError on malformed input or a kind mismatch.
ScoreTensor scores_from_json(std::string_view text);
FlagTensor flags_from_json(std::string_view text);
PredictionSets predictions_from_json(std::string_view text);

ScoreTensor load_scores(const std::filesystem::path& path);
FlagTensor load_flags(const std::filesystem::path& path);
PredictionSets load_predictions(const std::filesystem::path& path);

}  // namespace binet
