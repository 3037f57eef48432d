#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aact {

enum class ErrorKind {
  kInvalidInput,
  kDimension,
  kNumerical,
  kInvalidTask,
  kProtocol,
  kState,
  kFormat,
  kConfig,
  kData,
};

std::string_view to_string(ErrorKind kind);

// Library exception; kind() classifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse failure inside a binary file; carries the byte offset that failed.
class FormatError : public Error {
 public:
  FormatError(std::size_t offset, const std::string& what)
      : Error(ErrorKind::kFormat,
              what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace aact
