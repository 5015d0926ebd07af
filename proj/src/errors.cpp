#include "lak/errors.hpp"

namespace lak {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedObservation: return "MalformedObservation";
    case ErrorKind::EvaluationError: return "EvaluationError";
    case ErrorKind::NonMonotoneTime: return "NonMonotoneTime";
    case ErrorKind::NonClosedTransition: return "NonClosedTransition";
    case ErrorKind::UnknownState: return "UnknownState";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::ZeroLikelihood: return "ZeroLikelihood";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorKind kind, const std::string& message,
                           std::optional<std::size_t> line) {
  std::string out(to_string(kind));
  if (line) out += " (line " + std::to_string(*line) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

LaError::LaError(ErrorKind kind, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(format_message(kind, message, line)), kind_(kind), line_(line) {}

}  // namespace lak
