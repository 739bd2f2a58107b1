#include "jitminer/szz.hpp"

#include "jitminer/error.hpp"
#include "jitminer/parallel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <tuple>

namespace jitminer {

bool is_blank_line(std::string_view text) {
  return std::all_of(text.begin(), text.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

std::vector<InducingCandidate> candidate_inducers(const Repository &repo,
                                                  std::string_view fix_hash,
                                                  Timestamp fix_timestamp,
                                                  const std::vector<FileDelta> &fix_diff) {
  std::vector<InducingCandidate> out;
  std::set<std::tuple<std::string, std::string, std::size_t>> seen;
  for (const auto &delta : fix_diff) {
    if (delta.kind == DeltaKind::added || delta.binary) {
      continue;
    }
    std::vector<std::size_t> lines;
    for (const auto &hunk : delta.hunks) {
      for (const auto &line : hunk.deleted_lines) {
        if (!is_blank_line(line.text)) {
          lines.push_back(line.line_no);
        }
      }
    }
    if (lines.empty()) {
      continue;
    }
    const auto &path = delta.source_path();
    auto origins = repo.blame_lines(path, lines, fix_hash);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto &origin = origins[i];
      if (!seen.emplace(origin.hash, path, lines[i]).second) {
        continue;
      }
      out.push_back({origin.hash, std::string(fix_hash), path, lines[i], origin.author_time,
                     fix_timestamp});
    }
  }
  return out;
}

std::vector<InducingCandidate> candidate_inducers(const Repository &repo, const FixLink &fix) {
  auto commit = repo.commit(fix.commit_hash);
  return candidate_inducers(repo, commit.hash, commit.timestamp, repo.commit_diff(commit.hash));
}

std::vector<InducingPair> filter_candidates(const std::vector<InducingCandidate> &candidates,
                                            const BugTicket *ticket,
                                            const std::vector<FixLink> &fix_links,
                                            const SzzConfig &config) {
  std::set<std::string> fix_commits;
  for (const auto &link : fix_links) {
    fix_commits.insert(link.commit_hash);
  }
  std::map<std::string, InducingPair> grouped;
  for (const auto &c : candidates) {
    if (c.candidate_hash == c.fix_hash || c.candidate_timestamp > c.fix_timestamp) {
      continue;
    }
    bool partial = false;
    if (ticket != nullptr && c.candidate_timestamp > ticket->created_at) {
      if (!config.partial_fix_rule || !fix_commits.contains(c.candidate_hash)) {
        continue;
      }
      partial = true;
    }
    auto [it, inserted] = grouped.try_emplace(c.candidate_hash);
    auto &pair = it->second;
    if (inserted) {
      pair.inducing_hash = c.candidate_hash;
      pair.fix_hash = c.fix_hash;
      if (ticket != nullptr) {
        pair.ticket_id = ticket->ticket_id;
      }
      pair.partial_fix = partial;
    }
    pair.evidence.push_back({c.path, c.old_line_no, Side::old_side});
  }
  std::vector<InducingPair> pairs;
  pairs.reserve(grouped.size());
  for (auto &[hash, pair] : grouped) {
    std::sort(pair.evidence.begin(), pair.evidence.end());
    pair.evidence.erase(std::unique(pair.evidence.begin(), pair.evidence.end()),
                        pair.evidence.end());
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

SzzResult run_szz(const Repository &repo, const std::vector<CommitRecord> &commits,
                  const std::vector<FixLink> &fix_links, const std::vector<BugTicket> &tickets,
                  const SzzConfig &config, const DiffCache *diffs) {
  SzzResult result;

  std::map<std::string, const BugTicket *> ticket_by_id;
  for (const auto &t : tickets) {
    ticket_by_id.emplace(t.ticket_id, &t);
  }
  std::map<std::string, Timestamp> commit_time;
  for (const auto &c : commits) {
    commit_time.emplace(c.hash, c.timestamp);
  }

  // distinct fix commits in link order
  std::vector<std::string> fix_commits;
  std::map<std::string, std::vector<const FixLink *>> links_by_commit;
  for (const auto &link : fix_links) {
    auto &bucket = links_by_commit[link.commit_hash];
    if (bucket.empty()) {
      fix_commits.push_back(link.commit_hash);
    }
    bucket.push_back(&link);
  }

  struct Traced {
    std::vector<InducingCandidate> candidates;
    std::optional<std::string> error;
  };
  std::vector<Traced> traced(fix_commits.size());
  parallel_for(fix_commits.size(), config.jobs, [&](std::size_t i) {
    const auto &hash = fix_commits[i];
    try {
      Timestamp ts = 0;
      if (auto it = commit_time.find(hash); it != commit_time.end()) {
        ts = it->second;
      } else {
        ts = repo.commit(hash).timestamp;
      }
      const std::vector<FileDelta> *diff = nullptr;
      std::vector<FileDelta> fetched;
      if (diffs != nullptr) {
        if (auto it = diffs->find(hash); it != diffs->end()) {
          diff = &it->second;
        }
      }
      if (diff == nullptr) {
        fetched = repo.commit_diff(hash);
        diff = &fetched;
      }
      traced[i].candidates = candidate_inducers(repo, hash, ts, *diff);
    } catch (const Error &e) {
      traced[i].error = e.what();
    }
  });

  for (std::size_t i = 0; i < fix_commits.size(); ++i) {
    if (traced[i].error) {
      auto msg = "fix " + fix_commits[i] + " skipped: " + *traced[i].error;
      spdlog::warn("szz: {}", msg);
      result.warnings.push_back(std::move(msg));
      continue;
    }
    for (const FixLink *link : links_by_commit[fix_commits[i]]) {
      const BugTicket *ticket = nullptr;
      if (link->ticket_id) {
        if (auto it = ticket_by_id.find(*link->ticket_id); it != ticket_by_id.end()) {
          ticket = it->second;
        }
      }
      for (auto &pair : filter_candidates(traced[i].candidates, ticket, fix_links, config)) {
        result.pairs.push_back(std::move(pair));
      }
    }
  }

  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const InducingPair &a, const InducingPair &b) {
              return std::tie(a.fix_hash, a.inducing_hash, a.ticket_id) <
                     std::tie(b.fix_hash, b.inducing_hash, b.ticket_id);
            });

  std::map<std::string, std::vector<std::size_t>> pairs_by_inducer;
  for (std::size_t p = 0; p < result.pairs.size(); ++p) {
    pairs_by_inducer[result.pairs[p].inducing_hash].push_back(p);
  }
  result.labels.reserve(commits.size());
  for (const auto &c : commits) {
    CommitLabel label;
    label.commit_hash = c.hash;
    label.fix = links_by_commit.contains(c.hash);
    if (auto it = pairs_by_inducer.find(c.hash); it != pairs_by_inducer.end()) {
      label.inducing_pairs = it->second;
    }
    label.defective = !label.inducing_pairs.empty();
    result.labels.push_back(std::move(label));
  }
  return result;
}

std::vector<LineRef> defect_lines(const Repository &repo, const InducingPair &pair) {
  std::map<std::string, std::vector<std::size_t>> evidence_by_path;
  for (const auto &ref : pair.evidence) {
    evidence_by_path[ref.path].push_back(ref.line_no);
  }

  std::set<LineRef> traced;
  for (const auto &[path, lines] : evidence_by_path) {
    for (const auto &origin : repo.blame_lines(path, lines, pair.fix_hash)) {
      if (origin.hash == pair.inducing_hash) {
        traced.insert({origin.path, origin.line_no, Side::new_side});
      }
    }
  }

  std::set<LineRef> added;
  for (const auto &delta : repo.commit_diff(pair.inducing_hash)) {
    for (const auto &hunk : delta.hunks) {
      for (const auto &line : hunk.added_lines) {
        added.insert({delta.path, line.line_no, Side::new_side});
      }
    }
  }

  std::vector<LineRef> out;
  std::set_intersection(traced.begin(), traced.end(), added.begin(), added.end(),
                        std::back_inserter(out));
  if (out.empty()) {
    spdlog::warn("szz: no line added by {} is touched by fix {}", pair.inducing_hash,
                 pair.fix_hash);
  }
  return out;
}

} // namespace jitminer
