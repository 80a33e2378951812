#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace binet::detail {

std::string read_file(const std::filesystem::path& path);

/// Writes to `path.tmp` and renames over `path`, so readers never see partial files.
void write_atomically(const std::filesystem::path& path, std::string_view content);

/// Parses JSON, converting syntax errors into ParseError with line/column.
nlohmann::ordered_json parse_json(std::string_view text, const std::string& what);

/// Maps a byte offset to a 1-based (line, column).
std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset);

}  // namespace binet::detail
