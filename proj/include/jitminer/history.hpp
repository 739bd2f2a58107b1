#pragma once

#include "jitminer/metrics.hpp"
#include "jitminer/szz.hpp"
#include "jitminer/vcs.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace jitminer {

struct MinedCommit {
  CommitRecord commit;
  std::vector<FileDelta> deltas;
  std::size_t repo_file_count = 0;
  std::optional<std::string> error; // set when the diff could not be read
};

// Diffs and file counts for each commit, fetched on up to `jobs` threads.
// Failures are recorded per commit instead of thrown.
std::vector<MinedCommit> mine_commits(const Repository &repo,
                                      const std::vector<CommitRecord> &commits, std::size_t jobs);

struct HistoryMetrics {
  double ndev = 0;
  double age = 0;
  double nuc = 0;
};

struct ExperienceMetrics {
  double exp = 0;
  double rexp = 0;
  double sexp = 0;
};

// Prior-history index over a time-ordered commit list. Built in one
// sequential pass; afterwards every query is const and may run concurrently.
// Files are tracked by lineage so a rename keeps its history.
class HistoryIndex {
public:
  explicit HistoryIndex(std::vector<MinedCommit> commits);

  [[nodiscard]] std::size_t size() const { return commits_.size(); }
  [[nodiscard]] const MinedCommit &at(std::size_t i) const { return commits_[i]; }
  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view hash) const;

  [[nodiscard]] HistoryMetrics history_metrics(std::size_t i, const MetricsConfig &config) const;
  [[nodiscard]] ExperienceMetrics experience_metrics(std::size_t i,
                                                     const MetricsConfig &config) const;

  // Entropy over file-touch counts of the commits dated within `window_days`
  // before commit i, commit i included.
  [[nodiscard]] double window_entropy_at(std::size_t i, double window_days) const;

private:
  struct Touch {
    std::size_t commit = 0;
    std::size_t author = 0;
    Timestamp time = 0;
  };

  std::vector<MinedCommit> commits_;
  std::unordered_map<std::string, std::size_t> by_hash_;
  std::vector<std::size_t> author_of_;                    // per commit
  std::vector<std::vector<std::string>> subsystems_;      // per commit, sorted
  std::vector<std::vector<std::size_t>> prior_lineage_;   // per commit, lineages with history
  std::vector<std::vector<std::size_t>> touched_lineage_; // per commit
  std::vector<std::vector<Touch>> lineages_;              // touch events, commit order
  std::vector<std::vector<std::size_t>> author_commits_;  // commit indices, ascending
};

struct LabelLookup {
  std::set<std::string> fix_commits;
  std::set<std::string> defective_commits;

  static LabelLookup from(const SzzResult &szz, const std::vector<FixLink> &fix_links);
};

// One row per commit. A commit whose diff failed keeps its row, marked invalid.
FeatureVector extract_features(const HistoryIndex &index, std::size_t i,
                               const LabelLookup &labels, const MetricsConfig &config);

FeatureMatrix extract_feature_matrix(const HistoryIndex &index, const LabelLookup &labels,
                                     const MetricsConfig &config, std::size_t jobs);

} // namespace jitminer
