#pragma once

#include <stdexcept>
#include <string>

namespace binet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Events do not conform to the log schema (attribute count/names, duplicate case ids).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// An encoded tensor contains indices that the dictionaries cannot resolve.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line` and `column` are 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  /// The message without the position suffix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// NaN/inf values or invalid probability distributions.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A symbol is not part of a model's dictionaries.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

/// Random walk could not produce a case within the length cap.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Binary container has the wrong magic, version or layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace binet
