#include "jitminer/vcs.hpp"

#include "jitminer/error.hpp"
#include "jitminer/process.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>

namespace jitminer {

std::string_view to_string(Side side) { return side == Side::old_side ? "old" : "new"; }

std::string normalize_author(std::string_view name, std::string_view email) {
  std::string out;
  out.reserve(name.size() + email.size() + 3);
  out.append(name);
  out += " <";
  out.append(email);
  out += '>';
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

namespace {

ProcessResult run_git(const std::filesystem::path &dir, const std::vector<std::string> &args,
                      std::string input = {}) {
  std::vector<std::string> argv{"git",          "-C",          dir.string(),
                                "-c",           "core.quotepath=false",
                                "-c",           "diff.noprefix=false",
                                "-c",           "diff.mnemonicPrefix=false",
                                "--no-pager"};
  argv.insert(argv.end(), args.begin(), args.end());
  ProcessOptions options;
  options.input = std::move(input);
  options.env_set = {{"LC_ALL", "C"}, {"GIT_TERMINAL_PROMPT", "0"}};
  options.env_unset = {"GIT_DIR", "GIT_WORK_TREE", "GIT_INDEX_FILE", "GIT_OBJECT_DIRECTORY",
                       "GIT_NAMESPACE", "GIT_EXTERNAL_DIFF"};
  return run_process(argv, options);
}

std::string trim_newline(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) {
    s.pop_back();
  }
  return s;
}

void reject_option_like(std::string_view revision) {
  if (revision.empty() || revision.front() == '-') {
    throw Error(ErrorCode::UnknownCommit, "invalid revision '" + std::string(revision) + "'");
  }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

template <typename T> T parse_int(std::string_view s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc()) {
    throw Error(ErrorCode::IoError, "unexpected git output: '" + std::string(s) + "'");
  }
  return value;
}

std::size_t text_line_count(std::string_view content) {
  return looks_binary(content) ? 0 : count_lines(content);
}

constexpr std::string_view kLogFormat = "--format=%H%x1f%an%x1f%ae%x1f%at%x1f%P%x1f%B%x1e";

CommitRecord parse_log_record(std::string_view record) {
  while (!record.empty() && record.front() == '\n') {
    record.remove_prefix(1);
  }
  auto fields = split(record, '\x1f');
  if (fields.size() < 6) {
    throw Error(ErrorCode::IoError, "unexpected git log record");
  }
  CommitRecord commit;
  commit.hash = std::string(fields[0]);
  commit.author_id = normalize_author(fields[1], fields[2]);
  commit.timestamp = parse_int<Timestamp>(fields[3]);
  if (!fields[4].empty()) {
    for (auto parent : split(fields[4], ' ')) {
      commit.parents.emplace_back(parent);
    }
  }
  // the message itself may contain the unit separator
  std::string message;
  for (std::size_t i = 5; i < fields.size(); ++i) {
    if (i > 5) {
      message += '\x1f';
    }
    message.append(fields[i]);
  }
  commit.message = trim_newline(std::move(message));
  return commit;
}

} // namespace

Repository::Repository(std::filesystem::path root, std::string default_branch,
                       std::string empty_tree)
    : root_(std::move(root)), default_branch_(std::move(default_branch)),
      empty_tree_(std::move(empty_tree)) {}

Repository Repository::open(const std::filesystem::path &path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw Error(ErrorCode::IoError, "path does not exist: " + path.string());
  }
  if (!std::filesystem::is_directory(path, ec)) {
    throw Error(ErrorCode::NotARepository, "not a directory: " + path.string());
  }
  auto root = std::filesystem::canonical(path, ec);
  if (ec) {
    throw Error(ErrorCode::IoError, "cannot resolve " + path.string() + ": " + ec.message());
  }
  auto bare = run_git(root, {"rev-parse", "--is-bare-repository"});
  if (bare.exit_code != 0) {
    throw Error(ErrorCode::NotARepository, "not a git repository: " + root.string());
  }
  if (trim_newline(bare.out) == "true") {
    auto git_dir = run_git(root, {"rev-parse", "--git-dir"});
    if (trim_newline(git_dir.out) != ".") {
      throw Error(ErrorCode::NotARepository, "not the top of a repository: " + root.string());
    }
  } else {
    auto prefix = run_git(root, {"rev-parse", "--show-prefix"});
    if (prefix.exit_code != 0 || !trim_newline(prefix.out).empty()) {
      throw Error(ErrorCode::NotARepository,
                  "not the top of a git working tree: " + root.string());
    }
  }
  auto head = run_git(root, {"symbolic-ref", "--short", "-q", "HEAD"});
  std::string branch = head.exit_code == 0 ? trim_newline(head.out) : "HEAD";
  auto tree = run_git(root, {"hash-object", "-t", "tree", "--stdin"});
  if (tree.exit_code != 0) {
    throw Error(ErrorCode::IoError, "git hash-object failed: " + tree.err);
  }
  return Repository(root, branch, trim_newline(tree.out));
}

std::string Repository::git(const std::vector<std::string> &args) const {
  auto result = run_git(root_, args);
  if (result.exit_code != 0) {
    std::string cmd = "git";
    for (const auto &a : args) {
      cmd += " " + a;
    }
    throw Error(ErrorCode::IoError, cmd + " failed: " + trim_newline(result.err));
  }
  return std::move(result.out);
}

void Repository::require_commit(std::string_view hash) const {
  reject_option_like(hash);
  auto result = run_git(root_, {"cat-file", "-e", std::string(hash) + "^{commit}"});
  if (result.exit_code != 0) {
    throw Error(ErrorCode::UnknownCommit, "no such commit: " + std::string(hash));
  }
}

std::string Repository::resolve(std::string_view revision) const {
  reject_option_like(revision);
  auto result =
      run_git(root_, {"rev-parse", "--verify", "-q", std::string(revision) + "^{commit}"});
  if (result.exit_code != 0) {
    throw Error(ErrorCode::UnknownCommit, "no such commit: " + std::string(revision));
  }
  return trim_newline(result.out);
}

std::optional<std::string> Repository::first_parent(std::string_view hash) const {
  require_commit(hash);
  auto result = run_git(root_, {"rev-parse", "--verify", "-q", std::string(hash) + "^1"});
  if (result.exit_code != 0) {
    return std::nullopt;
  }
  return trim_newline(result.out);
}

std::vector<CommitRecord> Repository::list_commits(std::optional<Timestamp> since,
                                                   std::optional<Timestamp> until) const {
  auto tip = run_git(root_, {"rev-parse", "--verify", "-q", default_branch_ + "^{commit}"});
  if (tip.exit_code != 0) {
    return {};
  }
  auto out = git({"log", "--first-parent", "--topo-order", "--no-show-signature",
                  std::string(kLogFormat), trim_newline(tip.out), "--"});
  std::vector<CommitRecord> commits;
  for (auto record : split(out, '\x1e')) {
    if (record.find_first_not_of('\n') == std::string_view::npos) {
      continue;
    }
    auto commit = parse_log_record(record);
    if ((since && commit.timestamp < *since) || (until && commit.timestamp > *until)) {
      continue;
    }
    commits.push_back(std::move(commit));
  }
  std::sort(commits.begin(), commits.end(), [](const CommitRecord &a, const CommitRecord &b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.hash < b.hash;
  });
  return commits;
}

CommitRecord Repository::commit(std::string_view hash) const {
  require_commit(hash);
  auto out = git({"log", "-1", "--no-show-signature", std::string(kLogFormat),
                  std::string(hash) + "^{commit}", "--"});
  auto records = split(out, '\x1e');
  return parse_log_record(records.front());
}

std::vector<FileDelta> Repository::commit_diff(std::string_view hash) const {
  auto parent = first_parent(hash);
  const std::string base = parent.value_or(empty_tree_);
  const std::string target(hash);
  auto text = git({"diff", "--no-color", "--no-ext-diff", "--no-textconv", "-M", "-U0",
                   "--diff-algorithm=myers", "--src-prefix=a/", "--dst-prefix=b/", base, target,
                   "--"});
  auto deltas = parse_unified_diff(text);

  // Line totals on both sides, fetched in one cat-file round trip.
  struct Request {
    std::size_t delta;
    bool new_side;
  };
  std::vector<Request> requests;
  std::string batch;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const auto &d = deltas[i];
    if (d.binary) {
      continue;
    }
    if (d.kind != DeltaKind::added && parent) {
      if (d.source_path().find('\n') == std::string::npos) {
        requests.push_back({i, false});
        batch += base + ":" + d.source_path() + "\n";
      }
    }
    if (d.kind != DeltaKind::deleted && d.path.find('\n') == std::string::npos) {
      requests.push_back({i, true});
      batch += target + ":" + d.path + "\n";
    }
  }
  if (!requests.empty()) {
    auto result = run_git(root_, {"cat-file", "--batch"}, batch);
    if (result.exit_code != 0) {
      throw Error(ErrorCode::IoError, "git cat-file --batch failed: " + result.err);
    }
    std::string_view out = result.out;
    std::size_t pos = 0;
    for (const auto &request : requests) {
      auto eol = out.find('\n', pos);
      if (eol == std::string_view::npos) {
        throw Error(ErrorCode::IoError, "truncated git cat-file output");
      }
      auto header = out.substr(pos, eol - pos);
      pos = eol + 1;
      std::size_t lines = 0;
      if (!header.ends_with(" missing") && !header.ends_with(" ambiguous")) {
        auto fields = split(header, ' ');
        auto size = parse_int<std::size_t>(fields.back());
        auto body = out.substr(pos, size);
        pos += size + 1; // contents are followed by a newline
        if (fields.size() >= 2 && fields[1] == "blob") {
          lines = text_line_count(body);
        }
      }
      auto &d = deltas[request.delta];
      (request.new_side ? d.new_file_lines : d.old_file_lines) = lines;
    }
  }
  return deltas;
}

std::optional<std::string> Repository::read_file_at(std::string_view hash,
                                                     std::string_view path) const {
  require_commit(hash);
  auto result = run_git(root_, {"cat-file", "blob", std::string(hash) + ":" + std::string(path)});
  if (result.exit_code != 0) {
    return std::nullopt;
  }
  return std::move(result.out);
}

std::size_t Repository::file_line_count_at(std::string_view hash, std::string_view path) const {
  auto content = read_file_at(hash, path);
  return content ? text_line_count(*content) : 0;
}

std::size_t Repository::repo_file_count_at(std::string_view hash) const {
  require_commit(hash);
  auto out = git({"ls-tree", "-r", "-z", std::string(hash) + "^{tree}"});
  std::size_t count = 0;
  for (auto entry : split(out, '\0')) {
    auto fields = split(entry.substr(0, entry.find('\t')), ' ');
    if (fields.size() >= 2 && fields[1] == "blob") {
      ++count;
    }
  }
  return count;
}

std::vector<BlameOrigin> Repository::blame_at(std::string_view path,
                                              const std::vector<std::size_t> &line_nos,
                                              std::string_view revision) const {
  auto content = read_file_at(revision, path);
  if (!content) {
    throw Error(ErrorCode::FileAbsent,
                std::string(path) + " does not exist at " + std::string(revision));
  }
  const auto total = count_lines(*content);
  std::vector<std::size_t> wanted(line_nos);
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  for (auto n : wanted) {
    if (n < 1 || n > total) {
      throw Error(ErrorCode::LineOutOfRange, std::string(path) + " has " + std::to_string(total) +
                                                 " lines, requested line " + std::to_string(n));
    }
  }
  if (wanted.empty()) {
    return {};
  }

  std::vector<std::string> args{"blame", "--line-porcelain", "--no-progress"};
  for (std::size_t i = 0; i < wanted.size();) {
    std::size_t j = i;
    while (j + 1 < wanted.size() && wanted[j + 1] == wanted[j] + 1) {
      ++j;
    }
    args.push_back("-L");
    args.push_back(std::to_string(wanted[i]) + "," + std::to_string(wanted[j]));
    i = j + 1;
  }
  args.emplace_back(revision);
  args.emplace_back("--");
  args.emplace_back(path);
  auto out = git(args);

  std::map<std::size_t, BlameOrigin> by_final_line;
  BlameOrigin current;
  std::size_t final_line = 0;
  bool in_entry = false;
  for (auto line : split(out, '\n')) {
    if (line.empty()) {
      continue;
    }
    if (line.front() == '\t') {
      if (in_entry) {
        by_final_line[final_line] = current;
      }
      in_entry = false;
      continue;
    }
    if (!in_entry) {
      auto fields = split(line, ' ');
      if (fields.size() < 3) {
        throw Error(ErrorCode::IoError, "unexpected git blame output");
      }
      current = BlameOrigin{};
      current.hash = std::string(fields[0]);
      current.line_no = parse_int<std::size_t>(fields[1]);
      final_line = parse_int<std::size_t>(fields[2]);
      in_entry = true;
    } else if (line.starts_with("author-time ")) {
      current.author_time = parse_int<Timestamp>(line.substr(12));
    } else if (line.starts_with("filename ")) {
      auto name = line.substr(9);
      current.path = !name.empty() && name.front() == '"' ? unquote_path(name) : std::string(name);
    }
  }

  std::vector<BlameOrigin> origins;
  origins.reserve(line_nos.size());
  for (auto n : line_nos) {
    auto it = by_final_line.find(n);
    if (it == by_final_line.end()) {
      throw Error(ErrorCode::IoError, "git blame returned no entry for line " + std::to_string(n));
    }
    origins.push_back(it->second);
  }
  return origins;
}

std::vector<BlameOrigin> Repository::blame_lines(std::string_view path,
                                                 const std::vector<std::size_t> &line_nos,
                                                 std::string_view at_commit) const {
  auto parent = first_parent(at_commit);
  if (!parent) {
    throw Error(ErrorCode::FileAbsent,
                std::string(path) + ": " + std::string(at_commit) + " is a root commit");
  }
  return blame_at(path, line_nos, *parent);
}

std::string Repository::blame_line(std::string_view path, std::size_t line_no,
                                   std::string_view at_commit) const {
  return blame_lines(path, {line_no}, at_commit).front().hash;
}

} // namespace jitminer
