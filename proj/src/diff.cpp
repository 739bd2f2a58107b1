#include "jitminer/diff.hpp"

#include "jitminer/error.hpp"

#include <algorithm>
#include <charconv>

namespace jitminer {

std::string_view to_string(DeltaKind kind) {
  switch (kind) {
  case DeltaKind::added: return "added";
  case DeltaKind::modified: return "modified";
  case DeltaKind::deleted: return "deleted";
  case DeltaKind::renamed: return "renamed";
  }
  return "modified";
}

std::size_t count_lines(std::string_view content) {
  if (content.empty()) {
    return 0;
  }
  auto lines = static_cast<std::size_t>(std::count(content.begin(), content.end(), '\n'));
  if (content.back() != '\n') {
    ++lines;
  }
  return lines;
}

bool looks_binary(std::string_view content) {
  return content.substr(0, 8000).find('\0') != std::string_view::npos;
}

namespace {

constexpr std::string_view kDevNull = "/dev/null";

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string &what) {
  throw Error(ErrorCode::MalformedDiff, what, line_no);
}

// Decodes a git C-style quoted path ("a/foo\tbar"). Returns the decoded string
// and the number of input characters consumed.
std::pair<std::string, std::size_t> unquote(std::string_view s, std::size_t line_no) {
  std::string out;
  std::size_t i = 1;
  while (i < s.size() && s[i] != '"') {
    char c = s[i];
    if (c != '\\') {
      out.push_back(c);
      ++i;
      continue;
    }
    if (i + 1 >= s.size()) {
      malformed(line_no, "dangling escape in quoted path");
    }
    char e = s[i + 1];
    i += 2;
    switch (e) {
    case 'a': out.push_back('\a'); break;
    case 'b': out.push_back('\b'); break;
    case 'f': out.push_back('\f'); break;
    case 'n': out.push_back('\n'); break;
    case 'r': out.push_back('\r'); break;
    case 't': out.push_back('\t'); break;
    case 'v': out.push_back('\v'); break;
    case '"': out.push_back('"'); break;
    case '\\': out.push_back('\\'); break;
    default:
      if (e >= '0' && e <= '7' && i + 1 < s.size()) {
        int value = (e - '0') * 64 + (s[i] - '0') * 8 + (s[i + 1] - '0');
        out.push_back(static_cast<char>(value));
        i += 2;
      } else {
        malformed(line_no, "bad escape in quoted path");
      }
    }
  }
  if (i >= s.size()) {
    malformed(line_no, "unterminated quoted path");
  }
  return {out, i + 1};
}

bool needs_quoting(std::string_view path) {
  return std::any_of(path.begin(), path.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return c == '"' || c == '\\' || u < 0x20 || u == 0x7f;
  });
}

std::string quote(std::string_view path) {
  if (!needs_quoting(path)) {
    return std::string(path);
  }
  std::string out = "\"";
  for (char c : path) {
    switch (c) {
    case '"': out += "\\\""; break;
    case '\\': out += "\\\\"; break;
    case '\n': out += "\\n"; break;
    case '\t': out += "\\t"; break;
    case '\r': out += "\\r"; break;
    default:
      if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
        auto u = static_cast<unsigned char>(c);
        out += '\\';
        out += static_cast<char>('0' + (u >> 6));
        out += static_cast<char>('0' + ((u >> 3) & 7));
        out += static_cast<char>('0' + (u & 7));
      } else {
        out += c;
      }
    }
  }
  out += '"';
  return out;
}

std::string strip_prefix(std::string name, char side) {
  if (name.size() > 2 && name[0] == side && name[1] == '/') {
    return name.substr(2);
  }
  return name;
}

// Path operand of a "---"/"+++" line: quoted, or cut at the first tab
// (GNU diff appends a timestamp, git a bare tab for names with spaces).
std::string header_path(std::string_view operand, char side, std::size_t line_no) {
  if (!operand.empty() && operand.front() == '"') {
    return strip_prefix(unquote(operand, line_no).first, side);
  }
  auto tab = operand.find('\t');
  std::string name(operand.substr(0, tab));
  if (name == kDevNull) {
    return name;
  }
  return strip_prefix(std::move(name), side);
}

std::pair<std::string, std::string> git_header_names(std::string_view rest, std::size_t line_no) {
  if (!rest.empty() && rest.front() == '"') {
    auto [first, used] = unquote(rest, line_no);
    auto second = rest.substr(std::min(rest.size(), used + 1));
    std::string second_name = !second.empty() && second.front() == '"'
                                  ? unquote(second, line_no).first
                                  : std::string(second);
    return {strip_prefix(first, 'a'), strip_prefix(second_name, 'b')};
  }
  auto quote_pos = rest.find(" \"");
  if (quote_pos != std::string_view::npos) {
    return {strip_prefix(std::string(rest.substr(0, quote_pos)), 'a'),
            strip_prefix(unquote(rest.substr(quote_pos + 1), line_no).first, 'b')};
  }
  // Unquoted names may contain spaces; prefer the split giving equal names.
  std::size_t first_split = std::string_view::npos;
  for (auto k = rest.find(" b/"); k != std::string_view::npos; k = rest.find(" b/", k + 1)) {
    if (first_split == std::string_view::npos) {
      first_split = k;
    }
    if (rest.substr(0, 2) == "a/" && rest.substr(2, k - 2) == rest.substr(k + 3)) {
      return {std::string(rest.substr(2, k - 2)), std::string(rest.substr(k + 3))};
    }
  }
  if (first_split == std::string_view::npos) {
    auto space = rest.find(' ');
    if (space == std::string_view::npos) {
      malformed(line_no, "cannot read file names from diff header");
    }
    return {std::string(rest.substr(0, space)), std::string(rest.substr(space + 1))};
  }
  return {strip_prefix(std::string(rest.substr(0, first_split)), 'a'),
          std::string(rest.substr(first_split + 3))};
}

bool parse_number(std::string_view s, std::size_t &pos, std::size_t &value) {
  auto begin = s.data() + pos;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
  if (ec != std::errc() || ptr == begin) {
    return false;
  }
  pos = static_cast<std::size_t>(ptr - s.data());
  return true;
}

bool consume(std::string_view s, std::size_t &pos, std::string_view token) {
  if (s.substr(pos, token.size()) != token) {
    return false;
  }
  pos += token.size();
  return true;
}

Hunk parse_hunk_header(std::string_view line, std::size_t line_no) {
  Hunk hunk;
  std::size_t pos = 0;
  bool ok = consume(line, pos, "@@ -") && parse_number(line, pos, hunk.old_start);
  hunk.old_count = 1;
  if (ok && consume(line, pos, ",")) {
    ok = parse_number(line, pos, hunk.old_count);
  }
  ok = ok && consume(line, pos, " +") && parse_number(line, pos, hunk.new_start);
  hunk.new_count = 1;
  if (ok && consume(line, pos, ",")) {
    ok = parse_number(line, pos, hunk.new_count);
  }
  ok = ok && consume(line, pos, " @@");
  if (!ok) {
    malformed(line_no, "bad hunk header");
  }
  auto rest = line.substr(pos);
  if (!rest.empty() && rest.front() == ' ') {
    rest.remove_prefix(1);
  }
  hunk.section = std::string(rest);
  return hunk;
}

class Parser {
public:
  explicit Parser(std::string_view text) : lines_(split_lines(text)) {}

  std::vector<FileDelta> run() {
    while (i_ < lines_.size()) {
      auto line = lines_[i_];
      auto line_no = i_ + 1;
      if (line.starts_with("diff --git ")) {
        start_git_file(line, line_no);
      } else if (line.starts_with("--- ") && i_ + 1 < lines_.size() &&
                 lines_[i_ + 1].starts_with("+++ ")) {
        read_file_names(line, lines_[i_ + 1], line_no);
        i_ += 2;
        continue;
      } else if (line.starts_with("@@ ")) {
        if (!current_) {
          malformed(line_no, "hunk outside of a file section");
        }
        read_hunk(line, line_no);
        continue;
      } else if (line.starts_with("Binary files ")) {
        read_binary(line, line_no);
      } else if (line.starts_with("GIT binary patch")) {
        if (!current_) {
          malformed(line_no, "binary patch outside of a file section");
        }
        current_->binary = true;
        while (i_ + 1 < lines_.size() && !lines_[i_ + 1].starts_with("diff --git ")) {
          ++i_;
        }
      } else if (current_ && in_git_header_) {
        read_extended_header(line, line_no);
      } else if (current_ && !current_->hunks.empty() &&
                 (line.starts_with("+") || line.starts_with("-") || line.starts_with(" ") ||
                  line.starts_with("\\"))) {
        malformed(line_no, "hunk body longer than its header counts");
      }
      ++i_;
    }
    finish();
    return std::move(deltas_);
  }

private:
  struct Pending {
    std::string old_name;
    std::string new_name;
    bool saw_file_lines = false;
  };

  void finish() {
    if (!current_) {
      return;
    }
    FileDelta delta = std::move(*current_);
    current_.reset();
    in_git_header_ = false;
    const auto &old_name = pending_.old_name;
    const auto &new_name = pending_.new_name;
    if (old_name == kDevNull && delta.kind != DeltaKind::renamed) {
      delta.kind = DeltaKind::added;
    } else if (new_name == kDevNull && delta.kind != DeltaKind::renamed) {
      delta.kind = DeltaKind::deleted;
    }
    switch (delta.kind) {
    case DeltaKind::added:
      delta.path = new_name;
      delta.old_path.reset();
      break;
    case DeltaKind::deleted:
      delta.path = old_name;
      delta.old_path = old_name;
      break;
    case DeltaKind::renamed:
      delta.path = new_name;
      delta.old_path = old_name;
      break;
    case DeltaKind::modified:
      delta.path = new_name;
      if (old_name != new_name) {
        delta.old_path = old_name;
      }
      break;
    }
    for (const auto &hunk : delta.hunks) {
      delta.lines_added += hunk.added_lines.size();
      delta.lines_deleted += hunk.deleted_lines.size();
    }
    deltas_.push_back(std::move(delta));
  }

  void begin(std::string old_name, std::string new_name) {
    finish();
    current_ = FileDelta{};
    pending_ = Pending{std::move(old_name), std::move(new_name), false};
  }

  void start_git_file(std::string_view line, std::size_t line_no) {
    auto [old_name, new_name] = git_header_names(line.substr(11), line_no);
    begin(std::move(old_name), std::move(new_name));
    in_git_header_ = true;
  }

  void read_extended_header(std::string_view line, std::size_t line_no) {
    auto value = [&](std::string_view key) { return line.substr(key.size()); };
    auto path_value = [&](std::string_view key) {
      auto v = value(key);
      return !v.empty() && v.front() == '"' ? unquote(v, line_no).first : std::string(v);
    };
    if (line.starts_with("new file mode ")) {
      current_->kind = DeltaKind::added;
      current_->new_mode = std::string(value("new file mode "));
      pending_.old_name = std::string(kDevNull);
    } else if (line.starts_with("deleted file mode ")) {
      current_->kind = DeltaKind::deleted;
      current_->old_mode = std::string(value("deleted file mode "));
      pending_.new_name = std::string(kDevNull);
    } else if (line.starts_with("old mode ")) {
      current_->old_mode = std::string(value("old mode "));
    } else if (line.starts_with("new mode ")) {
      current_->new_mode = std::string(value("new mode "));
    } else if (line.starts_with("similarity index ")) {
      int pct = 0;
      auto v = value("similarity index ");
      std::from_chars(v.data(), v.data() + v.size(), pct);
      current_->similarity = pct;
    } else if (line.starts_with("rename from ")) {
      current_->kind = DeltaKind::renamed;
      pending_.old_name = path_value("rename from ");
    } else if (line.starts_with("rename to ")) {
      current_->kind = DeltaKind::renamed;
      pending_.new_name = path_value("rename to ");
    } else if (line.starts_with("copy from ") || line.starts_with("copy to ")) {
      // copies are reported as additions of the destination
      current_->kind = DeltaKind::added;
      pending_.old_name = std::string(kDevNull);
    }
  }

  void read_file_names(std::string_view minus, std::string_view plus, std::size_t line_no) {
    auto old_name = header_path(minus.substr(4), 'a', line_no);
    auto new_name = header_path(plus.substr(4), 'b', line_no + 1);
    if (!current_ || pending_.saw_file_lines || !current_->hunks.empty() || !in_git_header_) {
      begin(old_name, new_name);
    } else if (current_->kind != DeltaKind::renamed) {
      pending_.old_name = old_name;
      pending_.new_name = new_name;
    }
    pending_.saw_file_lines = true;
    in_git_header_ = false;
  }

  void read_binary(std::string_view line, std::size_t line_no) {
    auto body = line.substr(13);
    if (body.ends_with(" differ")) {
      body.remove_suffix(7);
    }
    auto sep = body.find(" and ");
    std::string old_name;
    std::string new_name;
    if (sep != std::string_view::npos) {
      old_name = header_path(body.substr(0, sep), 'a', line_no);
      new_name = header_path(body.substr(sep + 5), 'b', line_no);
    }
    if (!current_ || !in_git_header_) {
      begin(old_name, new_name);
    }
    if (old_name == kDevNull) {
      current_->kind = DeltaKind::added;
      pending_.old_name = old_name;
    } else if (new_name == kDevNull) {
      current_->kind = DeltaKind::deleted;
      pending_.new_name = new_name;
    }
    current_->binary = true;
    in_git_header_ = false;
  }

  void read_hunk(std::string_view header, std::size_t header_line) {
    Hunk hunk = parse_hunk_header(header, header_line);
    in_git_header_ = false;
    std::size_t old_left = hunk.old_count;
    std::size_t new_left = hunk.new_count;
    std::size_t old_pos = hunk.old_start;
    std::size_t new_pos = hunk.new_start;
    char last = 0;
    auto mark_missing_newline = [&](std::size_t line_no) {
      switch (last) {
      case '-': hunk.old_missing_newline = true; break;
      case '+': hunk.new_missing_newline = true; break;
      case ' ':
        hunk.old_missing_newline = true;
        hunk.new_missing_newline = true;
        break;
      default: malformed(line_no, "no-newline marker without a preceding line");
      }
    };
    ++i_;
    while (old_left > 0 || new_left > 0) {
      if (i_ >= lines_.size()) {
        malformed(header_line, "hunk truncated: body shorter than header counts");
      }
      auto line = lines_[i_];
      auto line_no = i_ + 1;
      char tag = line.empty() ? ' ' : line.front();
      std::string text(line.empty() ? line : line.substr(1));
      switch (tag) {
      case '-':
        if (old_left == 0) {
          malformed(line_no, "more deleted lines than the hunk header declares");
        }
        hunk.deleted_lines.push_back({old_pos++, std::move(text)});
        --old_left;
        break;
      case '+':
        if (new_left == 0) {
          malformed(line_no, "more added lines than the hunk header declares");
        }
        hunk.added_lines.push_back({new_pos++, std::move(text)});
        --new_left;
        break;
      case ' ':
        if (old_left == 0 || new_left == 0) {
          malformed(line_no, "more context lines than the hunk header declares");
        }
        hunk.context_lines.push_back({old_pos++, new_pos++, std::move(text)});
        --old_left;
        --new_left;
        break;
      case '\\':
        mark_missing_newline(line_no);
        ++i_;
        continue;
      default:
        malformed(line_no, "unexpected line inside hunk body");
      }
      last = tag;
      ++i_;
    }
    if (i_ < lines_.size() && lines_[i_].starts_with("\\")) {
      mark_missing_newline(i_ + 1);
      ++i_;
    }
    current_->hunks.push_back(std::move(hunk));
  }

  std::vector<std::string_view> lines_;
  std::size_t i_ = 0;
  std::optional<FileDelta> current_;
  Pending pending_;
  bool in_git_header_ = false;
  std::vector<FileDelta> deltas_;
};

void append_hunk(std::string &out, const Hunk &hunk) {
  out += format_hunk_header(hunk);
  out += '\n';
  auto old_end = hunk.old_start + hunk.old_count;
  auto new_end = hunk.new_start + hunk.new_count;
  std::size_t d = 0;
  std::size_t a = 0;
  std::size_t c = 0;
  auto emit = [&](char tag, const std::string &text, bool last_old, bool last_new) {
    out += tag;
    out += text;
    out += '\n';
    if ((last_old && hunk.old_missing_newline) || (last_new && hunk.new_missing_newline)) {
      out += "\\ No newline at end of file\n";
    }
  };
  while (d < hunk.deleted_lines.size() || a < hunk.added_lines.size() ||
         c < hunk.context_lines.size()) {
    std::size_t next_old = c < hunk.context_lines.size() ? hunk.context_lines[c].old_line_no
                                                         : old_end;
    std::size_t next_new = c < hunk.context_lines.size() ? hunk.context_lines[c].new_line_no
                                                         : new_end;
    while (d < hunk.deleted_lines.size() && hunk.deleted_lines[d].line_no < next_old) {
      const auto &line = hunk.deleted_lines[d];
      emit('-', line.text, line.line_no + 1 == old_end, false);
      ++d;
    }
    while (a < hunk.added_lines.size() && hunk.added_lines[a].line_no < next_new) {
      const auto &line = hunk.added_lines[a];
      emit('+', line.text, false, line.line_no + 1 == new_end);
      ++a;
    }
    if (c < hunk.context_lines.size()) {
      const auto &line = hunk.context_lines[c];
      emit(' ', line.text, line.old_line_no + 1 == old_end, line.new_line_no + 1 == new_end);
      ++c;
    } else if (d < hunk.deleted_lines.size() || a < hunk.added_lines.size()) {
      // line numbers outside the declared range; emit the rest in order
      for (; d < hunk.deleted_lines.size(); ++d) {
        emit('-', hunk.deleted_lines[d].text, false, false);
      }
      for (; a < hunk.added_lines.size(); ++a) {
        emit('+', hunk.added_lines[a].text, false, false);
      }
    }
  }
}

} // namespace

std::string unquote_path(std::string_view quoted) { return unquote(quoted, 0).first; }

std::vector<FileDelta> parse_unified_diff(std::string_view text) { return Parser(text).run(); }

std::string format_hunk_header(const Hunk &hunk) {
  std::string out = "@@ -" + std::to_string(hunk.old_start);
  if (hunk.old_count != 1) {
    out += "," + std::to_string(hunk.old_count);
  }
  out += " +" + std::to_string(hunk.new_start);
  if (hunk.new_count != 1) {
    out += "," + std::to_string(hunk.new_count);
  }
  out += " @@";
  if (!hunk.section.empty()) {
    out += " " + hunk.section;
  }
  return out;
}

std::string serialize_unified_diff(const std::vector<FileDelta> &deltas) {
  std::string out;
  for (const auto &delta : deltas) {
    const std::string &src = delta.source_path();
    const std::string &dst = delta.path;
    auto a_name = quote("a/" + src);
    auto b_name = quote("b/" + dst);
    out += "diff --git " + a_name + " " + b_name + "\n";
    switch (delta.kind) {
    case DeltaKind::added:
      if (!delta.new_mode.empty()) {
        out += "new file mode " + delta.new_mode + "\n";
      }
      break;
    case DeltaKind::deleted:
      if (!delta.old_mode.empty()) {
        out += "deleted file mode " + delta.old_mode + "\n";
      }
      break;
    case DeltaKind::modified:
    case DeltaKind::renamed:
      if (!delta.old_mode.empty()) {
        out += "old mode " + delta.old_mode + "\n";
      }
      if (!delta.new_mode.empty()) {
        out += "new mode " + delta.new_mode + "\n";
      }
      break;
    }
    if (delta.kind == DeltaKind::renamed) {
      if (delta.similarity) {
        out += "similarity index " + std::to_string(*delta.similarity) + "%\n";
      }
      out += "rename from " + quote(src) + "\n";
      out += "rename to " + quote(dst) + "\n";
    }
    std::string minus = delta.kind == DeltaKind::added ? std::string(kDevNull) : a_name;
    std::string plus = delta.kind == DeltaKind::deleted ? std::string(kDevNull) : b_name;
    if (delta.binary) {
      out += "Binary files " + minus + " and " + plus + " differ\n";
    } else if (!delta.hunks.empty()) {
      out += "--- " + minus + "\n";
      out += "+++ " + plus + "\n";
      for (const auto &hunk : delta.hunks) {
        append_hunk(out, hunk);
      }
    }
  }
  return out;
}

} // namespace jitminer
