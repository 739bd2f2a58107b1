#include "jitminer/history.hpp"

#include "jitminer/error.hpp"
#include "jitminer/parallel.hpp"

#include <algorithm>
#include <map>

namespace jitminer {

std::vector<MinedCommit> mine_commits(const Repository &repo,
                                      const std::vector<CommitRecord> &commits, std::size_t jobs) {
  std::vector<MinedCommit> out(commits.size());
  parallel_for(commits.size(), jobs, [&](std::size_t i) {
    auto &mined = out[i];
    mined.commit = commits[i];
    try {
      mined.deltas = repo.commit_diff(commits[i].hash);
      mined.repo_file_count = repo.repo_file_count_at(commits[i].hash);
    } catch (const Error &e) {
      mined.deltas.clear();
      mined.error = e.what();
    }
  });
  return out;
}

HistoryIndex::HistoryIndex(std::vector<MinedCommit> commits) : commits_(std::move(commits)) {
  const std::size_t n = commits_.size();
  author_of_.resize(n);
  subsystems_.resize(n);
  prior_lineage_.resize(n);
  touched_lineage_.resize(n);

  std::unordered_map<std::string, std::size_t> author_ids;
  std::unordered_map<std::string, std::size_t> lineage_of_path;

  auto new_lineage = [&] {
    lineages_.emplace_back();
    return lineages_.size() - 1;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const auto &mined = commits_[i];
    by_hash_.emplace(mined.commit.hash, i);
    auto [author_it, fresh] = author_ids.try_emplace(mined.commit.author_id, author_ids.size());
    if (fresh) {
      author_commits_.emplace_back();
    }
    author_of_[i] = author_it->second;
    author_commits_[author_it->second].push_back(i);

    std::set<std::string> subsystems;
    for (const auto &delta : mined.deltas) {
      subsystems.insert(subsystem_of(delta.path));

      std::optional<std::size_t> prior;
      if (delta.kind != DeltaKind::added) {
        if (auto it = lineage_of_path.find(delta.source_path()); it != lineage_of_path.end()) {
          prior = it->second;
        }
      }
      std::size_t lineage = prior ? *prior : new_lineage();
      switch (delta.kind) {
      case DeltaKind::added:
      case DeltaKind::modified:
        lineage_of_path[delta.path] = lineage;
        break;
      case DeltaKind::renamed:
        lineage_of_path.erase(delta.source_path());
        lineage_of_path[delta.path] = lineage;
        break;
      case DeltaKind::deleted:
        lineage_of_path.erase(delta.path);
        break;
      }
      if (prior && !lineages_[*prior].empty()) {
        prior_lineage_[i].push_back(*prior);
      }
      touched_lineage_[i].push_back(lineage);
    }
    subsystems_[i].assign(subsystems.begin(), subsystems.end());
    for (std::size_t lineage : touched_lineage_[i]) {
      auto &touches = lineages_[lineage];
      if (touches.empty() || touches.back().commit != i) {
        touches.push_back({i, author_of_[i], mined.commit.timestamp});
      }
    }
  }
}

std::optional<std::size_t> HistoryIndex::index_of(std::string_view hash) const {
  if (auto it = by_hash_.find(std::string(hash)); it != by_hash_.end()) {
    return it->second;
  }
  return std::nullopt;
}

HistoryMetrics HistoryIndex::history_metrics(std::size_t i, const MetricsConfig &config) const {
  std::set<std::size_t> authors;
  std::set<std::size_t> prior_commits;
  std::vector<double> ages;
  const Timestamp now = commits_[i].commit.timestamp;
  for (std::size_t lineage : prior_lineage_[i]) {
    const auto &touches = lineages_[lineage];
    auto end = std::lower_bound(touches.begin(), touches.end(), i,
                                [](const Touch &t, std::size_t c) { return t.commit < c; });
    if (end == touches.begin()) {
      continue;
    }
    for (auto it = touches.begin(); it != end; ++it) {
      authors.insert(it->author);
      prior_commits.insert(it->commit);
    }
    ages.push_back(static_cast<double>(now - std::prev(end)->time) / kSecondsPerDay);
  }
  HistoryMetrics out;
  out.ndev = static_cast<double>(authors.size());
  out.age = std::max(0.0, mean_age_days(ages));
  out.nuc = static_cast<double>(prior_commits.size());
  const auto nf = commits_[i].deltas.size();
  if (config.nuc_norm == NucNorm::by_nf && nf > 0) {
    out.nuc /= static_cast<double>(nf);
  }
  return out;
}

ExperienceMetrics HistoryIndex::experience_metrics(std::size_t i,
                                                   const MetricsConfig &config) const {
  const auto &own = author_commits_[author_of_[i]];
  const Timestamp now = commits_[i].commit.timestamp;
  const auto &subsystems = subsystems_[i];
  ExperienceMetrics out;
  for (std::size_t j : own) {
    if (j >= i) {
      break;
    }
    out.exp += 1;
    out.rexp += rexp_weight(commits_[j].commit.timestamp, now, config.rexp_year_offset);
    const auto &theirs = subsystems_[j];
    bool shared = std::find_first_of(subsystems.begin(), subsystems.end(), theirs.begin(),
                                     theirs.end()) != subsystems.end();
    if (shared) {
      out.sexp += 1;
    }
  }
  return out;
}

double HistoryIndex::window_entropy_at(std::size_t i, double window_days) const {
  const Timestamp now = commits_[i].commit.timestamp;
  const auto start = static_cast<double>(now) - window_days * kSecondsPerDay;
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t j = i + 1; j-- > 0;) {
    const auto ts = static_cast<double>(commits_[j].commit.timestamp);
    if (ts < start) {
      break;
    }
    if (ts > static_cast<double>(now)) {
      continue;
    }
    for (std::size_t lineage : touched_lineage_[j]) {
      ++counts[lineage];
    }
  }
  std::vector<std::size_t> touches;
  touches.reserve(counts.size());
  for (const auto &[lineage, count] : counts) {
    touches.push_back(count);
  }
  return window_entropy(touches);
}

LabelLookup LabelLookup::from(const SzzResult &szz, const std::vector<FixLink> &fix_links) {
  LabelLookup out;
  for (const auto &link : fix_links) {
    out.fix_commits.insert(link.commit_hash);
  }
  for (const auto &pair : szz.pairs) {
    out.defective_commits.insert(pair.inducing_hash);
  }
  return out;
}

FeatureVector extract_features(const HistoryIndex &index, std::size_t i,
                               const LabelLookup &labels, const MetricsConfig &config) {
  const auto &mined = index.at(i);
  FeatureVector row;
  row.commit_hash = mined.commit.hash;
  row.fix = labels.fix_commits.contains(row.commit_hash);
  row.defective = labels.defective_commits.contains(row.commit_hash);
  if (mined.error) {
    row.invalid_reason = *mined.error;
    return row;
  }
  try {
    const auto &deltas = mined.deltas;
    auto diffusion = diffusion_metrics(deltas);
    row.ns = static_cast<double>(diffusion.ns);
    row.nd = static_cast<double>(diffusion.nd);
    row.nf = static_cast<double>(diffusion.nf);
    if (config.nf_norm == NfNorm::by_repo_file_count && mined.repo_file_count > 0) {
      row.nf /= static_cast<double>(mined.repo_file_count);
    }
    row.entropy = config.entropy_mode == EntropyMode::windowed
                      ? index.window_entropy_at(i, config.window_days)
                      : change_entropy(deltas);
    auto size = size_metrics(deltas, config);
    row.la = size.la;
    row.ld = size.ld;
    row.lt = size.lt;
    auto history = index.history_metrics(i, config);
    row.ndev = history.ndev;
    row.age = history.age;
    row.nuc = history.nuc;
    auto experience = index.experience_metrics(i, config);
    row.exp = experience.exp;
    row.rexp = experience.rexp;
    row.sexp = experience.sexp;
  } catch (const std::exception &e) {
    row.invalid_reason = e.what();
  }
  return row;
}

FeatureMatrix extract_feature_matrix(const HistoryIndex &index, const LabelLookup &labels,
                                     const MetricsConfig &config, std::size_t jobs) {
  config.validate();
  FeatureMatrix matrix;
  matrix.rows.resize(index.size());
  parallel_for(index.size(), jobs, [&](std::size_t i) {
    matrix.rows[i] = extract_features(index, i, labels, config);
  });
  return matrix;
}

} // namespace jitminer
