#include "jitminer/metrics.hpp"

#include "jitminer/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace jitminer {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<std::pair<std::string_view, Enum>, N> &table,
                std::string_view what) {
  for (const auto &[name, value] : table) {
    if (name == s) {
      return value;
    }
  }
  std::string allowed;
  for (const auto &[name, value] : table) {
    allowed += allowed.empty() ? "" : "|";
    allowed += name;
  }
  throw Error(ErrorCode::ConfigError,
              "invalid " + std::string(what) + " '" + std::string(s) + "' (expected " + allowed + ")");
}

constexpr std::array<std::pair<std::string_view, EntropyMode>, 2> kEntropyModes{
    {{"per_commit", EntropyMode::per_commit}, {"windowed", EntropyMode::windowed}}};
constexpr std::array<std::pair<std::string_view, LaLdNorm>, 3> kLaLdNorms{
    {{"raw", LaLdNorm::raw}, {"by_new_file_size", LaLdNorm::by_new_file_size},
     {"by_lt", LaLdNorm::by_lt}}};
constexpr std::array<std::pair<std::string_view, LtNorm>, 2> kLtNorms{
    {{"raw", LtNorm::raw}, {"by_nf", LtNorm::by_nf}}};
constexpr std::array<std::pair<std::string_view, NfNorm>, 2> kNfNorms{
    {{"raw", NfNorm::raw}, {"by_repo_file_count", NfNorm::by_repo_file_count}}};
constexpr std::array<std::pair<std::string_view, NucNorm>, 2> kNucNorms{
    {{"raw", NucNorm::raw}, {"by_nf", NucNorm::by_nf}}};

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum v, const std::array<std::pair<std::string_view, Enum>, N> &table) {
  for (const auto &[name, value] : table) {
    if (value == v) {
      return name;
    }
  }
  return "?";
}

double *numeric_field(FeatureVector &row, std::string_view name) {
  if (name == "ns") return &row.ns;
  if (name == "nd") return &row.nd;
  if (name == "nf") return &row.nf;
  if (name == "entropy") return &row.entropy;
  if (name == "la") return &row.la;
  if (name == "ld") return &row.ld;
  if (name == "lt") return &row.lt;
  if (name == "ndev") return &row.ndev;
  if (name == "age") return &row.age;
  if (name == "nuc") return &row.nuc;
  if (name == "exp") return &row.exp;
  if (name == "rexp") return &row.rexp;
  if (name == "sexp") return &row.sexp;
  return nullptr;
}

double normalized(double x, const ColumnRange &range) {
  double span = range.max - range.min;
  return span > 0 ? (x - range.min) / span : 0.0;
}

} // namespace

std::string_view to_string(EntropyMode v) { return enum_name(v, kEntropyModes); }
std::string_view to_string(LaLdNorm v) { return enum_name(v, kLaLdNorms); }
std::string_view to_string(LtNorm v) { return enum_name(v, kLtNorms); }
std::string_view to_string(NfNorm v) { return enum_name(v, kNfNorms); }
std::string_view to_string(NucNorm v) { return enum_name(v, kNucNorms); }

EntropyMode parse_entropy_mode(std::string_view s) {
  return parse_enum(s, kEntropyModes, "entropy_mode");
}
LaLdNorm parse_la_ld_norm(std::string_view s) { return parse_enum(s, kLaLdNorms, "la_ld_norm"); }
LtNorm parse_lt_norm(std::string_view s) { return parse_enum(s, kLtNorms, "lt_norm"); }
NfNorm parse_nf_norm(std::string_view s) { return parse_enum(s, kNfNorms, "nf_norm"); }
NucNorm parse_nuc_norm(std::string_view s) { return parse_enum(s, kNucNorms, "nuc_norm"); }

void MetricsConfig::validate() const {
  if (!(window_days > 0)) {
    throw Error(ErrorCode::ConfigError, "window_days must be positive");
  }
  if (rexp_year_offset < -1 || rexp_year_offset > 1) {
    throw Error(ErrorCode::ConfigError, "rexp_year_offset must be -1, 0 or 1");
  }
}

bool is_feature_name(std::string_view name) {
  return std::find(kFeatureNames.begin(), kFeatureNames.end(), name) != kFeatureNames.end();
}

bool is_boolean_column(std::string_view name) { return name == "fix" || name == "defective"; }

std::vector<std::string> numeric_feature_names() {
  std::vector<std::string> out;
  for (auto name : kFeatureNames) {
    if (!is_boolean_column(name)) {
      out.emplace_back(name);
    }
  }
  return out;
}

double column_value(const FeatureVector &row, std::string_view name) {
  if (name == "fix") {
    return row.fix ? 1.0 : 0.0;
  }
  if (name == "defective") {
    return row.defective ? 1.0 : 0.0;
  }
  if (const double *field = numeric_field(const_cast<FeatureVector &>(row), name)) {
    return *field;
  }
  throw Error(ErrorCode::ConfigError, "unknown feature column '" + std::string(name) + "'");
}

void set_column_value(FeatureVector &row, std::string_view name, double value) {
  if (name == "fix") {
    row.fix = value != 0.0;
  } else if (name == "defective") {
    row.defective = value != 0.0;
  } else if (double *field = numeric_field(row, name)) {
    *field = value;
  } else {
    throw Error(ErrorCode::ConfigError, "unknown feature column '" + std::string(name) + "'");
  }
}

std::string subsystem_of(std::string_view path) {
  auto slash = path.find('/');
  return slash == std::string_view::npos ? std::string{} : std::string(path.substr(0, slash));
}

std::string directory_of(std::string_view path) {
  auto slash = path.rfind('/');
  return slash == std::string_view::npos ? std::string{} : std::string(path.substr(0, slash));
}

Diffusion diffusion_metrics(const std::vector<FileDelta> &deltas) {
  std::set<std::string> subsystems;
  std::set<std::string> directories;
  for (const auto &d : deltas) {
    subsystems.insert(subsystem_of(d.path));
    directories.insert(directory_of(d.path));
  }
  return {subsystems.size(), directories.size(), deltas.size()};
}

double shannon_entropy(std::span<const double> weights) {
  double total = 0;
  std::size_t positive = 0;
  for (double w : weights) {
    if (w > 0) {
      total += w;
      ++positive;
    }
  }
  if (positive < 2) {
    return 0.0;
  }
  double h = 0;
  for (double w : weights) {
    if (w > 0) {
      double p = w / total;
      h -= p * std::log2(p);
    }
  }
  return std::max(0.0, h);
}

double change_entropy(const std::vector<FileDelta> &deltas) {
  std::vector<double> weights;
  weights.reserve(deltas.size());
  for (const auto &d : deltas) {
    weights.push_back(static_cast<double>(d.lines_added + d.lines_deleted));
  }
  return shannon_entropy(weights);
}

double window_entropy(std::span<const std::size_t> touch_counts) {
  std::vector<double> weights(touch_counts.begin(), touch_counts.end());
  return shannon_entropy(weights);
}

SizeMetrics size_metrics(const std::vector<FileDelta> &deltas, const MetricsConfig &config) {
  double la = 0;
  double ld = 0;
  double lt_total = 0;
  double la_by_size = 0;
  double ld_by_size = 0;
  for (const auto &d : deltas) {
    la += static_cast<double>(d.lines_added);
    ld += static_cast<double>(d.lines_deleted);
    lt_total += static_cast<double>(d.old_file_lines);
    double denom = static_cast<double>(d.new_file_lines);
    if (d.kind == DeltaKind::deleted || d.new_file_lines == 0) {
      if (d.lines_added + d.lines_deleted > 0) {
        spdlog::debug("metrics: {} has no new-side lines, dividing by 1", d.path);
      }
      denom = 1;
    }
    la_by_size += static_cast<double>(d.lines_added) / denom;
    ld_by_size += static_cast<double>(d.lines_deleted) / denom;
  }
  const double nf = static_cast<double>(deltas.size());
  SizeMetrics out;
  const double lt = nf > 0 ? lt_total / nf : 0.0;
  switch (config.la_ld_norm) {
  case LaLdNorm::raw:
    out.la = la;
    out.ld = ld;
    break;
  case LaLdNorm::by_new_file_size:
    out.la = la_by_size;
    out.ld = ld_by_size;
    break;
  case LaLdNorm::by_lt:
    out.la = lt > 0 ? la / lt : la;
    out.ld = lt > 0 ? ld / lt : ld;
    break;
  }
  out.lt = config.lt_norm == LtNorm::by_nf && nf > 0 ? lt / nf : lt;
  return out;
}

double mean_age_days(std::span<const double> intervals_days) {
  if (intervals_days.empty()) {
    return 0.0;
  }
  double sum = 0;
  for (double d : intervals_days) {
    sum += d;
  }
  return sum / static_cast<double>(intervals_days.size());
}

double rexp_weight(Timestamp prior, Timestamp current, int year_offset) {
  double years = static_cast<double>(current - prior) / kSecondsPerYear;
  auto n = static_cast<long long>(std::floor(std::max(0.0, years))) + year_offset;
  n = std::max<long long>(n, 0);
  return 1.0 / static_cast<double>(n + 1);
}

FeatureMatrix min_max_normalize(const FeatureMatrix &matrix,
                                const std::vector<std::string> &columns) {
  if (matrix.rows.empty()) {
    throw Error(ErrorCode::EmptyDataset, "cannot normalize an empty matrix");
  }
  std::map<std::string, ColumnRange> ranges;
  for (const auto &name : columns) {
    if (is_boolean_column(name)) {
      continue;
    }
    if (!is_feature_name(name)) {
      throw Error(ErrorCode::ConfigError, "unknown feature column '" + name + "'");
    }
    ColumnRange range{std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
    for (const auto &row : matrix.rows) {
      double x = column_value(row, name);
      range.min = std::min(range.min, x);
      range.max = std::max(range.max, x);
    }
    ranges[name] = range;
  }
  return apply_normalization(matrix, ranges);
}

FeatureMatrix apply_normalization(const FeatureMatrix &matrix,
                                  const std::map<std::string, ColumnRange> &ranges) {
  FeatureMatrix out = matrix;
  for (const auto &[name, range] : ranges) {
    for (auto &row : out.rows) {
      set_column_value(row, name, normalized(column_value(row, name), range));
    }
    out.normalization[name] = range;
  }
  return out;
}

} // namespace jitminer
