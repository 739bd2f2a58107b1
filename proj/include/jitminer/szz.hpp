#pragma once

#include "jitminer/tracker.hpp"
#include "jitminer/vcs.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace jitminer {

// One blamed line of a fix commit.
struct InducingCandidate {
  std::string candidate_hash;
  std::string fix_hash;
  std::string path; // path in the fix commit's parent
  std::size_t old_line_no = 0;
  Timestamp candidate_timestamp = 0;
  Timestamp fix_timestamp = 0;

  friend bool operator==(const InducingCandidate &, const InducingCandidate &) = default;
};

struct InducingPair {
  std::string inducing_hash;
  std::string fix_hash;
  std::optional<std::string> ticket_id;
  std::vector<LineRef> evidence; // old-side lines of the fix that blamed to inducing_hash
  bool partial_fix = false;

  friend bool operator==(const InducingPair &, const InducingPair &) = default;
};

struct CommitLabel {
  std::string commit_hash;
  bool defective = false;
  bool fix = false;
  std::vector<std::size_t> inducing_pairs; // indices into SzzResult::pairs

  friend bool operator==(const CommitLabel &, const CommitLabel &) = default;
};

struct SzzConfig {
  // Keep candidates dated after the report when they are themselves fixes.
  bool partial_fix_rule = true;
  std::size_t jobs = 1;
};

struct SzzResult {
  std::vector<InducingPair> pairs; // ordered by fix hash, inducing hash, ticket id
  std::vector<CommitLabel> labels; // one per input commit, same order
  std::vector<std::string> warnings;
};

using DiffCache = std::unordered_map<std::string, std::vector<FileDelta>>;

// True when the line holds nothing but whitespace; such deletions are not blamed.
bool is_blank_line(std::string_view text);

// Blames every non-blank deleted line of the fix at the fix's first parent.
// Deduplicated on (candidate, path, line).
std::vector<InducingCandidate> candidate_inducers(const Repository &repo, const FixLink &fix);
std::vector<InducingCandidate> candidate_inducers(const Repository &repo,
                                                  std::string_view fix_hash,
                                                  Timestamp fix_timestamp,
                                                  const std::vector<FileDelta> &fix_diff);

// Date filter. With a ticket, candidates dated after its creation are dropped
// unless they are linked fixes themselves (kept as partial fixes). Without a
// ticket every candidate is kept. Candidates dated after the fix are always
// dropped. Returns one pair per surviving candidate commit.
std::vector<InducingPair> filter_candidates(const std::vector<InducingCandidate> &candidates,
                                            const BugTicket *ticket,
                                            const std::vector<FixLink> &fix_links,
                                            const SzzConfig &config = {});

// End-to-end labeling. Errors on a single fix commit are reported as warnings.
// `diffs` may carry precomputed commit_diff results keyed by hash.
SzzResult run_szz(const Repository &repo, const std::vector<CommitRecord> &commits,
                  const std::vector<FixLink> &fix_links, const std::vector<BugTicket> &tickets,
                  const SzzConfig &config = {}, const DiffCache *diffs = nullptr);

// Lines (new side of the inducing commit) that the inducing commit added and
// the fix later removed or rewrote, traced back through blame.
std::vector<LineRef> defect_lines(const Repository &repo, const InducingPair &pair);

} // namespace jitminer
