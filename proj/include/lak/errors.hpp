#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lak {

enum class ErrorKind {
  MalformedObservation,
  EvaluationError,
  NonMonotoneTime,
  NonClosedTransition,
  UnknownState,
  InvalidParams,
  ZeroLikelihood,
  EmptyCorpus,
  SchemaMismatch,
  DimensionMismatch,
  InsufficientSamples,
  ParseError,
  IoError,
  SchemaError,
};

std::string_view to_string(ErrorKind kind);

/// Domain error raised by every module. `line` is set by the file loaders.
class LaError : public std::runtime_error {
 public:
  LaError(ErrorKind kind, const std::string& message,
          std::optional<std::size_t> line = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> line_;
};

}  // namespace lak
