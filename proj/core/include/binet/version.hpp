#pragma once

#include <string_view>

namespace binet {

inline constexpr std::string_view kVersion = "0.1.0";
/// Version of the JSON layouts for logs, graphs, tensors and assignments.
inline constexpr int kJsonFormatVersion = 1;

}  // namespace binet
