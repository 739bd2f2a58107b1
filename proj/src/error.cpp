#include "jitminer/error.hpp"

namespace jitminer {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::NotARepository: return "NotARepository";
  case ErrorCode::IoError: return "IoError";
  case ErrorCode::UnknownCommit: return "UnknownCommit";
  case ErrorCode::MalformedDiff: return "MalformedDiff";
  case ErrorCode::LineOutOfRange: return "LineOutOfRange";
  case ErrorCode::FileAbsent: return "FileAbsent";
  case ErrorCode::MalformedExport: return "MalformedExport";
  case ErrorCode::SchemaMismatch: return "SchemaMismatch";
  case ErrorCode::MalformedRow: return "MalformedRow";
  case ErrorCode::EmptyDataset: return "EmptyDataset";
  case ErrorCode::TooFewRows: return "TooFewRows";
  case ErrorCode::SingleClass: return "SingleClass";
  case ErrorCode::BadShape: return "BadShape";
  case ErrorCode::ConfigError: return "ConfigError";
  case ErrorCode::UnknownPair: return "UnknownPair";
  }
  return "Unknown";
}

std::string_view module_of(ErrorCode code) {
  switch (code) {
  case ErrorCode::NotARepository:
  case ErrorCode::IoError:
  case ErrorCode::UnknownCommit:
  case ErrorCode::MalformedDiff:
  case ErrorCode::LineOutOfRange:
  case ErrorCode::FileAbsent:
    return "vcs";
  case ErrorCode::MalformedExport:
    return "tracker";
  case ErrorCode::SchemaMismatch:
  case ErrorCode::MalformedRow:
  case ErrorCode::EmptyDataset:
    return "dataset";
  case ErrorCode::TooFewRows:
  case ErrorCode::SingleClass:
  case ErrorCode::BadShape:
    return "model";
  case ErrorCode::ConfigError:
    return "config";
  case ErrorCode::UnknownPair:
    return "szz";
  }
  return "jitminer";
}

namespace {

std::string format_message(ErrorCode code, const std::string &message,
                           std::optional<std::size_t> location) {
  std::string out(module_of(code));
  out += ": ";
  out += to_string(code);
  if (location) {
    out += " at ";
    out += std::to_string(*location);
  }
  out += ": ";
  out += message;
  return out;
}

} // namespace

Error::Error(ErrorCode code, const std::string &message, std::optional<std::size_t> location)
    : std::runtime_error(format_message(code, message, location)), code_(code),
      location_(location) {}

} // namespace jitminer
