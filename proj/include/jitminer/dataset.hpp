#pragma once

#include "jitminer/history.hpp"
#include "jitminer/metrics.hpp"

#include "json.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace jitminer {

// Fixed-point with 6 decimals, locale independent. Integral values keep the
// decimals too ("3.000000").
std::string format_value(double v);

// Header plus one line per valid row. Invalid rows are skipped with a warning.
// Returns the number of data rows written.
std::size_t write_csv(const FeatureMatrix &matrix, std::ostream &out);
std::size_t export_csv(const FeatureMatrix &matrix, const std::filesystem::path &path);

// The header must match the export header exactly. Errors:
// SchemaMismatch naming the offending column, MalformedRow with the 1-based
// data row number.
FeatureMatrix parse_csv(std::string_view text);
FeatureMatrix import_csv(const std::filesystem::path &path);

struct ColumnStats {
  double min = 0;
  double max = 0;
  double mean = 0;
  double stddev = 0; // population
};

struct DatasetSummary {
  std::map<std::string, ColumnStats> features; // every feature column
  std::size_t row_count = 0;
  std::size_t defective_count = 0;
  std::size_t fix_count = 0;
  std::optional<std::pair<Timestamp, Timestamp>> period;

  [[nodiscard]] double defective_ratio() const {
    return row_count == 0 ? 0.0
                          : static_cast<double>(defective_count) / static_cast<double>(row_count);
  }
};

// Throws Error(EmptyDataset) when there are no valid rows.
DatasetSummary summarize(const FeatureMatrix &matrix);

struct ExtensionRow {
  std::string extension; // lowercase, no dot; "no extension" for the bucket
  double mean_files = 0; // changed files with this extension per defective commit
};

struct ExtensionReport {
  std::vector<ExtensionRow> rows; // descending by mean_files, then name
  std::size_t defective_commits = 0;
  double mean_files_per_commit = 0;
  double mean_extensions_per_commit = 0;
};

inline constexpr std::string_view kNoExtension = "no extension";

// Text after the last dot of the file name, lowercased. Dotfiles and names
// without a dot map to kNoExtension.
std::string file_extension(std::string_view path);

// One entry per defective commit: the paths it changed.
ExtensionReport extension_report(const std::vector<std::vector<std::string>> &defective_changes);
ExtensionReport extension_report(const HistoryIndex &index, const LabelLookup &labels);

nlohmann::json to_json(const DatasetSummary &summary);
nlohmann::json to_json(const ExtensionReport &report);
std::string format_summary_table(const DatasetSummary &summary);
std::string format_extension_table(const ExtensionReport &report);

} // namespace jitminer
