#pragma once

#include "jitminer/diff.hpp"
#include "jitminer/vcs.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jitminer {

enum class EntropyMode { per_commit, windowed };
enum class LaLdNorm { raw, by_new_file_size, by_lt };
enum class LtNorm { raw, by_nf };
enum class NfNorm { raw, by_repo_file_count };
enum class NucNorm { raw, by_nf };

std::string_view to_string(EntropyMode v);
std::string_view to_string(LaLdNorm v);
std::string_view to_string(LtNorm v);
std::string_view to_string(NfNorm v);
std::string_view to_string(NucNorm v);

EntropyMode parse_entropy_mode(std::string_view s);
LaLdNorm parse_la_ld_norm(std::string_view s);
LtNorm parse_lt_norm(std::string_view s);
NfNorm parse_nf_norm(std::string_view s);
NucNorm parse_nuc_norm(std::string_view s);

// Defaults reproduce the exported columns of the reference dataset: nf as a
// share of the repository's files, everything else raw.
struct MetricsConfig {
  EntropyMode entropy_mode = EntropyMode::per_commit;
  double window_days = 14;
  LaLdNorm la_ld_norm = LaLdNorm::raw;
  LtNorm lt_norm = LtNorm::raw;
  NfNorm nf_norm = NfNorm::by_repo_file_count;
  NucNorm nuc_norm = NucNorm::raw;
  // Added to the elapsed whole years in the REXP weight 1/(n+1); -1 treats
  // years as 1-indexed.
  int rexp_year_offset = 0;

  void validate() const;
};

inline constexpr std::array<std::string_view, 14> kFeatureNames{
    "ns", "nd", "nf", "entropy", "la", "ld", "lt", "fix", "ndev", "age", "nuc", "exp", "rexp",
    "sexp"};

// Exact column order of the dataset CSV.
inline constexpr std::array<std::string_view, 16> kDatasetColumns{
    "commit", "ns",  "nd",  "nf",  "entropy", "la",   "ld",   "lt",
    "fix",    "ndev", "age", "nuc", "exp",     "rexp", "sexp", "defective"};

struct FeatureVector {
  std::string commit_hash;
  double ns = 0;
  double nd = 0;
  double nf = 0;
  double entropy = 0;
  double la = 0;
  double ld = 0;
  double lt = 0;
  bool fix = false;
  double ndev = 0;
  double age = 0;
  double nuc = 0;
  double exp = 0;
  double rexp = 0;
  double sexp = 0;
  bool defective = false;
  std::optional<std::string> invalid_reason;

  [[nodiscard]] bool valid() const { return !invalid_reason; }

  friend bool operator==(const FeatureVector &, const FeatureVector &) = default;
};

bool is_feature_name(std::string_view name);
bool is_boolean_column(std::string_view name); // fix, defective

// Numeric view of any feature or label column; booleans read as 0/1.
double column_value(const FeatureVector &row, std::string_view name);
void set_column_value(FeatureVector &row, std::string_view name, double value);

struct ColumnRange {
  double min = 0;
  double max = 0;

  friend bool operator==(const ColumnRange &, const ColumnRange &) = default;
};

struct FeatureMatrix {
  std::vector<FeatureVector> rows;
  std::vector<std::string> feature_order{kDatasetColumns.begin(), kDatasetColumns.end()};
  std::map<std::string, ColumnRange> normalization; // ranges used by min_max_normalize

  friend bool operator==(const FeatureMatrix &, const FeatureMatrix &) = default;
};

struct Diffusion {
  std::size_t ns = 0;
  std::size_t nd = 0;
  std::size_t nf = 0;
};

// First path component; "" for files at the repository root.
std::string subsystem_of(std::string_view path);
// Containing directory; "" for files at the repository root.
std::string directory_of(std::string_view path);

Diffusion diffusion_metrics(const std::vector<FileDelta> &deltas);

// H = -sum p_k log2 p_k with p_k = w_k / sum(w). Zero weights are skipped;
// H = 0 when fewer than two weights are positive.
double shannon_entropy(std::span<const double> weights);

// Weights are lines added + deleted per file.
double change_entropy(const std::vector<FileDelta> &deltas);

// Weights are how many changes in the window touched each file.
double window_entropy(std::span<const std::size_t> touch_counts);

struct SizeMetrics {
  double la = 0;
  double ld = 0;
  double lt = 0;
};

// Uses the per-file line totals recorded on each delta. lt is the mean
// pre-change size over the modified files (added files count as 0).
SizeMetrics size_metrics(const std::vector<FileDelta> &deltas, const MetricsConfig &config);

// Mean of the given day intervals; 0 for an empty set.
double mean_age_days(std::span<const double> intervals_days);

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kSecondsPerYear = 365.25 * kSecondsPerDay;

// 1/(n+1) with n = whole years between the two instants plus the offset,
// floored at 0.
double rexp_weight(Timestamp prior, Timestamp current, int year_offset);

// (x - min) / (max - min) per selected numeric column; constant columns
// become 0; boolean columns are left untouched. The ranges are recorded in
// the result's `normalization` map. Throws Error(EmptyDataset) on no rows.
FeatureMatrix min_max_normalize(const FeatureMatrix &matrix,
                                const std::vector<std::string> &columns);

// Applies previously fitted ranges (e.g. from the training split) to new rows.
FeatureMatrix apply_normalization(const FeatureMatrix &matrix,
                                  const std::map<std::string, ColumnRange> &ranges);

std::vector<std::string> numeric_feature_names();

} // namespace jitminer
