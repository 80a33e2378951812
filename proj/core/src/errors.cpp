#include "binet/errors.hpp"

namespace binet {

namespace {

std::string with_position(const std::string& message, std::size_t line, std::size_t column) {
  if (line == 0) return message;
  return message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error(with_position(message, line, column)), message_(message), line_(line), column_(column) {}

}  // namespace binet
