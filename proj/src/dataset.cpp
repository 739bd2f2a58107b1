#include "jitminer/dataset.hpp"

#include "jitminer/csv.hpp"
#include "jitminer/error.hpp"

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace jitminer {

namespace {

double parse_number(std::string_view text, bool &ok) {
  double v = 0;
  const char *first = text.data();
  const char *last = text.data() + text.size();
  if (!text.empty() && *first == '+') {
    ++first;
  }
  auto [ptr, ec] = std::from_chars(first, last, v);
  ok = ec == std::errc{} && ptr == last && first != last && std::isfinite(v);
  return v;
}

} // namespace

std::string format_value(double v) {
  if (v == 0) {
    v = 0; // no "-0.000000"
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  if (ec != std::errc{}) {
    throw Error(ErrorCode::IoError, "value out of range for export");
  }
  std::string out(buf, ptr);
  if (out == "-0.000000") {
    out = "0.000000";
  }
  return out;
}

std::size_t write_csv(const FeatureMatrix &matrix, std::ostream &out) {
  std::vector<std::string> fields(kDatasetColumns.begin(), kDatasetColumns.end());
  out << csv::join(fields) << '\n';
  std::size_t written = 0;
  std::size_t skipped = 0;
  for (const auto &row : matrix.rows) {
    if (!row.valid()) {
      ++skipped;
      continue;
    }
    fields.clear();
    fields.push_back(row.commit_hash);
    for (auto name : kFeatureNames) {
      fields.push_back(is_boolean_column(name) ? (column_value(row, name) != 0 ? "1" : "0")
                                               : format_value(column_value(row, name)));
    }
    fields.emplace_back(row.defective ? "1" : "0");
    out << csv::join(fields) << '\n';
    ++written;
  }
  if (skipped > 0) {
    spdlog::warn("dataset: {} invalid rows not exported", skipped);
  }
  return written;
}

std::size_t export_csv(const FeatureMatrix &matrix, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  auto n = write_csv(matrix, out);
  out.flush();
  if (!out) {
    throw Error(ErrorCode::IoError, "write failed for " + path.string());
  }
  return n;
}

FeatureMatrix parse_csv(std::string_view text) {
  std::vector<csv::Record> records;
  try {
    records = csv::parse(text);
  } catch (const std::invalid_argument &e) {
    throw Error(ErrorCode::MalformedRow, e.what());
  }
  if (records.empty()) {
    throw Error(ErrorCode::SchemaMismatch, "missing header row");
  }
  const auto &header = records.front().fields;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c >= kDatasetColumns.size()) {
      throw Error(ErrorCode::SchemaMismatch, "unexpected column '" + header[c] + "'");
    }
    if (header[c] != kDatasetColumns[c]) {
      throw Error(ErrorCode::SchemaMismatch,
                  fmt::format("column {} is '{}', expected '{}'", c + 1, header[c],
                              kDatasetColumns[c]));
    }
  }
  if (header.size() < kDatasetColumns.size()) {
    throw Error(ErrorCode::SchemaMismatch,
                "missing column '" + std::string(kDatasetColumns[header.size()]) + "'");
  }

  FeatureMatrix matrix;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto &fields = records[r].fields;
    const std::size_t row_no = r;
    if (fields.size() != kDatasetColumns.size()) {
      throw Error(ErrorCode::MalformedRow,
                  fmt::format("expected {} fields, found {}", kDatasetColumns.size(), fields.size()),
                  row_no);
    }
    FeatureVector row;
    row.commit_hash = fields[0];
    if (row.commit_hash.empty()) {
      throw Error(ErrorCode::MalformedRow, "empty commit", row_no);
    }
    for (std::size_t c = 1; c < fields.size(); ++c) {
      auto name = kDatasetColumns[c];
      if (is_boolean_column(name)) {
        if (fields[c] != "0" && fields[c] != "1") {
          throw Error(ErrorCode::MalformedRow,
                      fmt::format("{} must be 0 or 1, found '{}'", name, fields[c]), row_no);
        }
        set_column_value(row, name, fields[c] == "1" ? 1.0 : 0.0);
        continue;
      }
      bool ok = false;
      double v = parse_number(fields[c], ok);
      if (!ok) {
        throw Error(ErrorCode::MalformedRow,
                    fmt::format("{} is not a number: '{}'", name, fields[c]), row_no);
      }
      set_column_value(row, name, v);
    }
    matrix.rows.push_back(std::move(row));
  }
  return matrix;
}

FeatureMatrix import_csv(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

DatasetSummary summarize(const FeatureMatrix &matrix) {
  std::vector<const FeatureVector *> rows;
  for (const auto &row : matrix.rows) {
    if (row.valid()) {
      rows.push_back(&row);
    }
  }
  if (rows.empty()) {
    throw Error(ErrorCode::EmptyDataset, "no rows to summarize");
  }
  DatasetSummary summary;
  summary.row_count = rows.size();
  const auto n = static_cast<double>(rows.size());
  for (auto name : kFeatureNames) {
    ColumnStats stats{column_value(*rows.front(), name), column_value(*rows.front(), name), 0, 0};
    double sum = 0;
    for (const auto *row : rows) {
      double x = column_value(*row, name);
      stats.min = std::min(stats.min, x);
      stats.max = std::max(stats.max, x);
      sum += x;
    }
    stats.mean = sum / n;
    double sq = 0;
    for (const auto *row : rows) {
      double d = column_value(*row, name) - stats.mean;
      sq += d * d;
    }
    stats.stddev = std::sqrt(sq / n);
    // summation can push the mean a hair outside [min, max]
    stats.mean = std::clamp(stats.mean, stats.min, stats.max);
    summary.features.emplace(std::string(name), stats);
  }
  for (const auto *row : rows) {
    summary.defective_count += row->defective ? 1 : 0;
    summary.fix_count += row->fix ? 1 : 0;
  }
  return summary;
}

std::string file_extension(std::string_view path) {
  auto slash = path.rfind('/');
  auto name = slash == std::string_view::npos ? path : path.substr(slash + 1);
  auto dot = name.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == name.size()) {
    return std::string(kNoExtension);
  }
  std::string ext(name.substr(dot + 1));
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

ExtensionReport extension_report(const std::vector<std::vector<std::string>> &defective_changes) {
  ExtensionReport report;
  report.defective_commits = defective_changes.size();
  if (defective_changes.empty()) {
    return report;
  }
  std::map<std::string, std::size_t> files_by_ext;
  std::size_t total_files = 0;
  std::size_t total_distinct = 0;
  for (const auto &paths : defective_changes) {
    std::set<std::string> distinct;
    for (const auto &p : paths) {
      auto ext = file_extension(p);
      ++files_by_ext[ext];
      distinct.insert(ext);
    }
    total_files += paths.size();
    total_distinct += distinct.size();
  }
  const auto n = static_cast<double>(defective_changes.size());
  for (const auto &[ext, count] : files_by_ext) {
    report.rows.push_back({ext, static_cast<double>(count) / n});
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ExtensionRow &a, const ExtensionRow &b) {
                     return a.mean_files > b.mean_files;
                   });
  report.mean_files_per_commit = static_cast<double>(total_files) / n;
  report.mean_extensions_per_commit = static_cast<double>(total_distinct) / n;
  return report;
}

ExtensionReport extension_report(const HistoryIndex &index, const LabelLookup &labels) {
  std::vector<std::vector<std::string>> changes;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto &mined = index.at(i);
    if (!labels.defective_commits.contains(mined.commit.hash)) {
      continue;
    }
    std::vector<std::string> paths;
    for (const auto &d : mined.deltas) {
      paths.push_back(d.path);
    }
    changes.push_back(std::move(paths));
  }
  return extension_report(changes);
}

nlohmann::json to_json(const DatasetSummary &summary) {
  nlohmann::json features = nlohmann::json::object();
  for (auto name : kFeatureNames) {
    const auto &s = summary.features.at(std::string(name));
    features[std::string(name)] = {
        {"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"stddev", s.stddev}};
  }
  nlohmann::json out = {
      {"rows", summary.row_count},
      {"defective", summary.defective_count},
      {"fix", summary.fix_count},
      {"defective_ratio", summary.defective_ratio()},
      {"features", features},
  };
  if (summary.period) {
    out["period"] = {{"first", summary.period->first}, {"last", summary.period->second}};
  }
  return out;
}

nlohmann::json to_json(const ExtensionReport &report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &row : report.rows) {
    rows.push_back({{"extension", row.extension}, {"mean_files", row.mean_files}});
  }
  return {
      {"defective_commits", report.defective_commits},
      {"mean_files_per_commit", report.mean_files_per_commit},
      {"mean_extensions_per_commit", report.mean_extensions_per_commit},
      {"extensions", rows},
  };
}

std::string format_summary_table(const DatasetSummary &summary) {
  std::string out;
  out += fmt::format("rows       {}\n", summary.row_count);
  out += fmt::format("defective  {} ({:.2f}%)\n", summary.defective_count,
                     100.0 * summary.defective_ratio());
  out += fmt::format("fix        {}\n", summary.fix_count);
  if (summary.period) {
    out += fmt::format("period     {} .. {}\n", summary.period->first, summary.period->second);
  }
  out += fmt::format("\n{:<8} {:>14} {:>14} {:>14} {:>14}\n", "feature", "min", "max", "mean",
                     "stddev");
  for (auto name : kFeatureNames) {
    const auto &s = summary.features.at(std::string(name));
    out += fmt::format("{:<8} {:>14.6f} {:>14.6f} {:>14.6f} {:>14.6f}\n", name, s.min, s.max,
                       s.mean, s.stddev);
  }
  return out;
}

std::string format_extension_table(const ExtensionReport &report) {
  std::string out;
  out += fmt::format("defective commits           {}\n", report.defective_commits);
  out += fmt::format("files per defective commit  {:.2f}\n", report.mean_files_per_commit);
  out += fmt::format("file types per commit       {:.2f}\n", report.mean_extensions_per_commit);
  if (!report.rows.empty()) {
    out += fmt::format("\n{:<16} {:>10}\n", "extension", "mean");
    for (const auto &row : report.rows) {
      out += fmt::format("{:<16} {:>10.2f}\n", row.extension, row.mean_files);
    }
  }
  return out;
}

} // namespace jitminer
