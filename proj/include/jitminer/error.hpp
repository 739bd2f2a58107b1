#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace jitminer {

enum class ErrorCode {
  NotARepository,
  IoError,
  UnknownCommit,
  MalformedDiff,
  LineOutOfRange,
  FileAbsent,
  MalformedExport,
  SchemaMismatch,
  MalformedRow,
  EmptyDataset,
  TooFewRows,
  SingleClass,
  BadShape,
  ConfigError,
  UnknownPair,
};

std::string_view to_string(ErrorCode code);

// Name of the module that raises a given error, used as the message prefix.
std::string_view module_of(ErrorCode code);

// Single exception type for the library. `location()` carries the 1-based
// line (diffs) or row (CSV) number when the error points into an input.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message,
        std::optional<std::size_t> location = std::nullopt);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] std::optional<std::size_t> location() const noexcept { return location_; }

private:
  ErrorCode code_;
  std::optional<std::size_t> location_;
};

} // namespace jitminer
