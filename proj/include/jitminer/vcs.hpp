#pragma once

#include "jitminer/diff.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jitminer {

using Timestamp = std::int64_t; // UTC seconds

struct CommitRecord {
  std::string hash;      // 40 hex chars
  std::string author_id; // lowercase "name <email>"
  Timestamp timestamp = 0; // author time
  std::string message;
  std::vector<std::string> parents;

  friend bool operator==(const CommitRecord &, const CommitRecord &) = default;
};

enum class Side { old_side, new_side };

struct LineRef {
  std::string path;
  std::size_t line_no = 0;
  Side side = Side::old_side;

  friend auto operator<=>(const LineRef &, const LineRef &) = default;
};

std::string_view to_string(Side side);

struct BlameOrigin {
  std::string hash;        // commit that introduced the line
  std::string path;        // path of the file in that commit
  std::size_t line_no = 0; // line number in that commit's version of the file
  Timestamp author_time = 0;
};

std::string normalize_author(std::string_view name, std::string_view email);

// Read-only handle on a git working copy or bare repository. All queries shell
// out to `git` and never modify the repository; a const handle may be shared
// between threads.
class Repository {
public:
  // Throws Error(IoError) when `path` does not exist and
  // Error(NotARepository) when it is not the top level of a git repository.
  static Repository open(const std::filesystem::path &path);

  [[nodiscard]] const std::filesystem::path &root() const { return root_; }
  [[nodiscard]] const std::string &default_branch() const { return default_branch_; }

  // First-parent history of the default branch, ascending by timestamp, ties
  // by hash. Bounds are inclusive. Empty for a repository without commits.
  [[nodiscard]] std::vector<CommitRecord> list_commits(std::optional<Timestamp> since = {},
                                                       std::optional<Timestamp> until = {}) const;

  [[nodiscard]] CommitRecord commit(std::string_view hash) const;

  // Per-file changes against the first parent (the empty tree for a root
  // commit), with rename detection and zero context lines. Line totals of each
  // file before and after the change are filled in.
  [[nodiscard]] std::vector<FileDelta> commit_diff(std::string_view hash) const;

  // Commit that last touched `line_no` of `path` as it exists in the first
  // parent of `at_commit`.
  [[nodiscard]] std::string blame_line(std::string_view path, std::size_t line_no,
                                       std::string_view at_commit) const;

  // Batch form over the first parent of `at_commit`: one origin per requested
  // line, in request order. Follows renames.
  [[nodiscard]] std::vector<BlameOrigin> blame_lines(std::string_view path,
                                                     const std::vector<std::size_t> &line_nos,
                                                     std::string_view at_commit) const;

  // Same as blame_lines but against `revision` itself rather than its parent.
  [[nodiscard]] std::vector<BlameOrigin> blame_at(std::string_view path,
                                                  const std::vector<std::size_t> &line_nos,
                                                  std::string_view revision) const;

  [[nodiscard]] std::size_t file_line_count_at(std::string_view hash, std::string_view path) const;
  [[nodiscard]] std::size_t repo_file_count_at(std::string_view hash) const;
  [[nodiscard]] std::optional<std::string> read_file_at(std::string_view hash,
                                                        std::string_view path) const;

  // Full hash of the first parent, or nullopt for a root commit.
  [[nodiscard]] std::optional<std::string> first_parent(std::string_view hash) const;

  // Resolves any revision expression to a full commit hash.
  [[nodiscard]] std::string resolve(std::string_view revision) const;

  // Raw `git` invocation inside the repository; returns stdout and throws
  // Error(IoError) on a non-zero exit.
  [[nodiscard]] std::string git(const std::vector<std::string> &args) const;

private:
  Repository(std::filesystem::path root, std::string default_branch, std::string empty_tree);

  void require_commit(std::string_view hash) const;

  std::filesystem::path root_;
  std::string default_branch_;
  std::string empty_tree_;
};

} // namespace jitminer
