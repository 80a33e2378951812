#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "binet/evaluation.hpp"

namespace binet {

/// One line of the results CSV.
struct ResultRow {
  std::string dataset;
  std::string method;
  std::string level;
  std::string heuristic;
  std::string strategy;
  std::uint64_t seed = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const ResultRow&) const = default;
};

inline constexpr const char* kResultsHeader = "dataset,method,level,heuristic,strategy,seed,precision,recall,f1";

std::string results_csv(const std::vector<ResultRow>& rows);
/// Throws ParseError (with line number) on a wrong header or malformed line.
std::vector<ResultRow> parse_results_csv(std::string_view text);

/// F1 matrix over the rows of one level, averaged over seeds (and any other
/// column that varies) per (dataset, method). Datasets and methods keep their
/// first-appearance order. Throws PreconditionError if a cell is missing.
RankTable rank_table(const std::vector<ResultRow>& rows, const std::string& level);

std::string f1_matrix_csv(const RankTable& table);

struct RankingSummary {
  RankTable table;
  std::vector<double> average_ranks;
  FriedmanResult friedman;
  double critical_difference = 0.0;
  std::vector<std::vector<std::size_t>> groups;
};

/// Friedman test, Nemenyi CD and CD groups of `table`.
RankingSummary summarize(const RankTable& table);

std::string summary_json(const RankingSummary& summary);
/// Critical-difference diagram: rank axis, one labelled marker per method and a
/// bar for every group of methods within CD of each other.
std::string cd_diagram_svg(const RankingSummary& summary);

/// Writes f1_<level>.csv, ranking_<level>.json and cd_<level>.svg into `directory`.
/// Returns the summary. Files are written atomically.
RankingSummary emit_report(const std::vector<ResultRow>& rows, const std::string& level,
                           const std::filesystem::path& directory);

}  // namespace binet
