#pragma once

#include <stdexcept>
#include <string>

namespace kgpipe {

// Broad error categories. The CLI maps each category to its own exit code.
enum class ErrorKind {
  kGeneric,
  kConfig,
  kPrecondition,
  kOrdering,
  kCheckpoint,
  kBackend,
  kParse,
  kIo,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, ErrorKind kind = ErrorKind::kGeneric)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what, ErrorKind::kConfig) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(what, ErrorKind::kPrecondition) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what, ErrorKind::kIo) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what, ErrorKind::kParse) {}
};

// Raised by stages whose response text could not be interpreted. The raw
// text is kept so callers can persist it for inspection.
class ResponseParseError : public ParseError {
 public:
  ResponseParseError(const std::string& what, std::string raw)
      : ParseError(what), raw_(std::move(raw)) {}

  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class OrderingError : public Error {
 public:
  explicit OrderingError(const std::string& what) : Error(what, ErrorKind::kOrdering) {}
};

class CheckpointError : public Error {
 public:
  explicit CheckpointError(const std::string& what) : Error(what, ErrorKind::kCheckpoint) {}
};

}  // namespace kgpipe
