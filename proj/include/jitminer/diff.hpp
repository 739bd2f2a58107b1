#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jitminer {

struct DiffLine {
  std::size_t line_no = 0; // 1-based, on the side the line belongs to
  std::string text;        // without the +/- prefix and without the newline

  friend bool operator==(const DiffLine &, const DiffLine &) = default;
};

struct ContextLine {
  std::size_t old_line_no = 0;
  std::size_t new_line_no = 0;
  std::string text;

  friend bool operator==(const ContextLine &, const ContextLine &) = default;
};

// One @@ block. old_count == deleted_lines + context_lines and
// new_count == added_lines + context_lines; diffs produced with -U0 carry no
// context. When a count is 0 the matching start is the line *before* the
// change, as in git and GNU diff.
struct Hunk {
  std::size_t old_start = 0;
  std::size_t old_count = 0;
  std::size_t new_start = 0;
  std::size_t new_count = 0;
  std::string section; // trailing text after the closing "@@", without the separating space
  std::vector<DiffLine> deleted_lines;
  std::vector<DiffLine> added_lines;
  std::vector<ContextLine> context_lines;
  bool old_missing_newline = false;
  bool new_missing_newline = false;

  friend bool operator==(const Hunk &, const Hunk &) = default;
};

enum class DeltaKind { added, modified, deleted, renamed };

std::string_view to_string(DeltaKind kind);

struct FileDelta {
  std::string path;                    // new side; the removed path for deletions
  std::optional<std::string> old_path; // set for renames and deletions
  DeltaKind kind = DeltaKind::modified;
  std::vector<Hunk> hunks;
  std::size_t lines_added = 0;
  std::size_t lines_deleted = 0;
  std::size_t new_file_lines = 0; // text lines after the change, 0 when deleted or binary
  std::size_t old_file_lines = 0; // text lines before the change, 0 when added or binary
  bool binary = false;
  std::string old_mode;
  std::string new_mode;
  std::optional<int> similarity; // rename similarity percentage

  // Path of the file in the parent revision.
  [[nodiscard]] const std::string &source_path() const { return old_path ? *old_path : path; }

  friend bool operator==(const FileDelta &, const FileDelta &) = default;
};

// Parses git-style ("diff --git") or plain unified diffs. Binary markers give
// a delta with no hunks; "\ No newline at end of file" is recorded on the hunk.
// Throws Error(MalformedDiff) carrying the 1-based line number of the first
// offending line; a hunk truncated by end of input reports its header line.
std::vector<FileDelta> parse_unified_diff(std::string_view text);

// Renders deltas as git-style unified diff text. Hunk headers follow git
// byte-for-byte ("@@ -l,s +l,s @@", ",s" omitted when s == 1).
std::string serialize_unified_diff(const std::vector<FileDelta> &deltas);

std::string format_hunk_header(const Hunk &hunk);

// Decodes a git C-style quoted path, including the surrounding quotes.
std::string unquote_path(std::string_view quoted);

// Number of text lines in a file body: newline count, plus one for an
// unterminated last line.
std::size_t count_lines(std::string_view content);

// git's heuristic: a NUL byte within the first 8000 bytes.
bool looks_binary(std::string_view content);

} // namespace jitminer
