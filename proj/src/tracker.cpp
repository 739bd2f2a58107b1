#include "jitminer/tracker.hpp"

#include "jitminer/csv.hpp"
#include "jitminer/error.hpp"

#include "json.hpp"
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace jitminer {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool read_int(std::string_view s, std::size_t &pos, std::size_t digits, int &out) {
  if (pos + digits > s.size()) {
    return false;
  }
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + digits, out);
  if (ec != std::errc() || ptr != s.data() + pos + digits) {
    return false;
  }
  pos += digits;
  return true;
}

std::string escape_regex(std::string_view word) {
  static const std::string special = R"(\^$.|?*+()[]{}/)";
  std::string out;
  for (char c : word) {
    if (special.find(c) != std::string::npos) {
      out += '\\';
    }
    out += c;
  }
  return out;
}

std::optional<std::string> json_text(const nlohmann::json &value) {
  if (value.is_string()) {
    return value.get<std::string>();
  }
  if (value.is_number_integer()) {
    return std::to_string(value.get<std::int64_t>());
  }
  if (value.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << value.get<double>();
    return os.str();
  }
  return std::nullopt;
}

struct RawTicket {
  std::string id;
  std::string time;
  std::string changetime;
  std::string status;
  std::string type;
  std::string summary;
};

// Shared validation for both formats; `where` names the record in warnings.
void accept_record(RawTicket raw, const std::string &where, std::set<std::string> &seen,
                   TicketImport &out) {
  auto warn = [&](const std::string &msg) {
    out.warnings.push_back(where + ": " + msg);
    spdlog::warn("tracker: {}: {}", where, msg);
  };
  std::string id(trim(raw.id));
  if (!id.empty() && id.front() == '#') {
    id.erase(0, 1);
  }
  if (id.empty()) {
    warn("missing ticket id, record skipped");
    return;
  }
  if (seen.contains(id)) {
    warn("duplicate ticket id " + id + ", record skipped");
    return;
  }
  auto created = parse_timestamp(raw.time);
  if (!created) {
    warn("ticket " + id + " has unreadable creation time '" + raw.time + "', record skipped");
    return;
  }
  BugTicket ticket;
  ticket.ticket_id = id;
  ticket.created_at = *created;
  ticket.status = std::string(trim(raw.status));
  ticket.ticket_type = std::string(trim(raw.type));
  ticket.summary = std::move(raw.summary);
  if (ticket.is_closed() && !trim(raw.changetime).empty()) {
    auto closed = parse_timestamp(raw.changetime);
    if (!closed) {
      warn("ticket " + id + " has unreadable changetime '" + raw.changetime + "', ignored");
    } else if (*closed < ticket.created_at) {
      warn("ticket " + id + " closed before it was created, closing time ignored");
    } else {
      ticket.closed_at = closed;
    }
  }
  seen.insert(id);
  out.tickets.push_back(std::move(ticket));
}

TicketImport parse_csv_export(std::string_view text) {
  std::vector<csv::Record> records;
  try {
    records = csv::parse(text);
  } catch (const std::invalid_argument &e) {
    throw Error(ErrorCode::MalformedExport, e.what());
  }
  if (records.empty()) {
    throw Error(ErrorCode::MalformedExport, "empty export, no header row");
  }
  std::map<std::string, std::size_t> columns;
  const auto &header = records.front().fields;
  for (std::size_t i = 0; i < header.size(); ++i) {
    columns.emplace(lower(trim(header[i])), i);
  }
  auto column = [&](std::initializer_list<std::string_view> names) -> std::optional<std::size_t> {
    for (auto name : names) {
      if (auto it = columns.find(std::string(name)); it != columns.end()) {
        return it->second;
      }
    }
    return std::nullopt;
  };
  auto id_col = column({"id", "ticket", "#"});
  auto time_col = column({"time", "created"});
  if (!id_col) {
    throw Error(ErrorCode::MalformedExport, "header has no 'id' column");
  }
  if (!time_col) {
    throw Error(ErrorCode::MalformedExport, "header has no 'time' column");
  }
  auto changetime_col = column({"changetime", "modified"});
  auto status_col = column({"status"});
  auto type_col = column({"type"});
  auto summary_col = column({"summary"});

  TicketImport out;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto &fields = records[r].fields;
    auto get = [&](std::optional<std::size_t> col) {
      return col && *col < fields.size() ? fields[*col] : std::string{};
    };
    RawTicket raw{get(id_col),     get(time_col), get(changetime_col),
                  get(status_col), get(type_col), get(summary_col)};
    accept_record(std::move(raw), "line " + std::to_string(records[r].line_no), seen, out);
  }
  return out;
}

TicketImport parse_json_export(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorCode::MalformedExport, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::MalformedExport, "JSON export must be an array of ticket objects");
  }
  TicketImport out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto &item = doc[i];
    std::string where = "record " + std::to_string(i);
    if (!item.is_object()) {
      out.warnings.push_back(where + ": not an object, skipped");
      spdlog::warn("tracker: {}: not an object, skipped", where);
      continue;
    }
    auto field = [&](std::initializer_list<const char *> names) {
      for (const char *name : names) {
        if (auto it = item.find(name); it != item.end()) {
          if (auto text = json_text(*it)) {
            return *text;
          }
        }
      }
      return std::string{};
    };
    RawTicket raw{field({"id", "ticket"}),    field({"time", "created"}),
                  field({"changetime", "modified"}), field({"status"}),
                  field({"type"}),           field({"summary"})};
    accept_record(std::move(raw), where, seen, out);
  }
  return out;
}

} // namespace

bool BugTicket::is_closed() const { return lower(status) == "closed"; }

bool BugTicket::is_defect() const { return lower(ticket_type) == "defect"; }

TicketFormat parse_ticket_format(std::string_view name) {
  auto n = lower(name);
  if (n == "csv") {
    return TicketFormat::csv;
  }
  if (n == "json") {
    return TicketFormat::json;
  }
  throw Error(ErrorCode::ConfigError, "unknown ticket format '" + std::string(name) + "'");
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.empty()) {
    return std::nullopt;
  }
  bool numeric = std::all_of(text.begin(), text.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-';
  });
  if (numeric && text.find('-', 1) == std::string_view::npos) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      return std::nullopt;
    }
    return static_cast<Timestamp>(std::floor(value));
  }

  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  std::size_t pos = 0;
  if (!read_int(text, pos, 4, y) || pos >= text.size() || text[pos++] != '-' ||
      !read_int(text, pos, 2, mo) || pos >= text.size() || text[pos++] != '-' ||
      !read_int(text, pos, 2, d)) {
    return std::nullopt;
  }
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    return std::nullopt;
  }
  Timestamp offset = 0;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ') {
      return std::nullopt;
    }
    ++pos;
    if (!read_int(text, pos, 2, h) || pos >= text.size() || text[pos++] != ':' ||
        !read_int(text, pos, 2, mi)) {
      return std::nullopt;
    }
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      if (!read_int(text, pos, 2, s)) {
        return std::nullopt;
      }
      if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
          ++pos;
        }
      }
    }
    if (h > 23 || mi > 59 || s > 60) {
      return std::nullopt;
    }
    if (pos < text.size()) {
      char z = text[pos];
      if (z == 'Z' || z == 'z') {
        ++pos;
      } else if (z == '+' || z == '-') {
        ++pos;
        int oh = 0, om = 0;
        if (!read_int(text, pos, 2, oh)) {
          return std::nullopt;
        }
        if (pos < text.size() && text[pos] == ':') {
          ++pos;
        }
        if (pos < text.size() && !read_int(text, pos, 2, om)) {
          return std::nullopt;
        }
        offset = (z == '+' ? 1 : -1) * (oh * 3600 + om * 60);
      } else {
        return std::nullopt;
      }
    }
    if (pos != text.size()) {
      return std::nullopt;
    }
  }
  auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * 86400 + h * 3600 + mi * 60 + s - offset;
}

TicketImport parse_ticket_export(std::string_view text, TicketFormat format) {
  return format == TicketFormat::csv ? parse_csv_export(text) : parse_json_export(text);
}

TicketImport load_ticket_export(const std::filesystem::path &path, TicketFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot read ticket export " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_ticket_export(buffer.str(), format);
}

std::string_view to_string(LinkMethod method) {
  return method == LinkMethod::ticket_id_match ? "ticket_id_match" : "keyword";
}

void LinkConfig::validate() const {
  if (id_patterns.empty() || fix_keywords.empty()) {
    throw Error(ErrorCode::ConfigError, "link patterns and fix keywords must be nonempty");
  }
}

FixMatcher::FixMatcher(const LinkConfig &config) : case_insensitive_(config.case_insensitive) {
  config.validate();
  auto flags = std::regex::ECMAScript;
  if (config.case_insensitive) {
    flags |= std::regex::icase;
  }
  for (const auto &pattern : config.id_patterns) {
    try {
      std::regex re(pattern, flags);
      if (re.mark_count() != 1) {
        throw Error(ErrorCode::ConfigError,
                    "id pattern '" + pattern + "' must have exactly one capture group");
      }
      id_patterns_.push_back(std::move(re));
    } catch (const std::regex_error &e) {
      throw Error(ErrorCode::ConfigError, "bad id pattern '" + pattern + "': " + e.what());
    }
  }
  if (config.word_boundary_match) {
    std::string alternation;
    for (const auto &word : config.fix_keywords) {
      if (!alternation.empty()) {
        alternation += '|';
      }
      alternation += escape_regex(word);
    }
    keywords_.emplace("\\b(?:" + alternation + ")\\b", flags);
  } else {
    for (const auto &word : config.fix_keywords) {
      plain_keywords_.push_back(config.case_insensitive ? lower(word) : word);
    }
  }
}

std::vector<IdMention> FixMatcher::ticket_mentions(std::string_view message) const {
  struct Hit {
    std::size_t pos;
    IdMention mention;
  };
  std::vector<Hit> hits;
  const std::string text(message);
  for (const auto &re : id_patterns_) {
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
         it != std::sregex_iterator(); ++it) {
      const auto &m = *it;
      hits.push_back({static_cast<std::size_t>(m.position(0)), {m[1].str(), m[0].str()}});
    }
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const Hit &a, const Hit &b) { return a.pos < b.pos; });
  std::vector<IdMention> out;
  std::set<std::string> seen;
  for (auto &hit : hits) {
    if (seen.insert(hit.mention.ticket_id).second) {
      out.push_back(std::move(hit.mention));
    }
  }
  return out;
}

std::optional<std::string> FixMatcher::keyword(std::string_view message) const {
  if (keywords_) {
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_search(message.begin(), message.end(), m, *keywords_)) {
      return m[0].str();
    }
    return std::nullopt;
  }
  const std::string haystack = case_insensitive_ ? lower(message) : std::string(message);
  std::optional<std::size_t> best;
  std::size_t best_len = 0;
  for (const auto &word : plain_keywords_) {
    auto pos = haystack.find(word);
    if (pos != std::string::npos && (!best || pos < *best)) {
      best = pos;
      best_len = word.size();
    }
  }
  if (!best) {
    return std::nullopt;
  }
  return std::string(message.substr(*best, best_len));
}

bool FixMatcher::is_fix(std::string_view message) const {
  return !ticket_mentions(message).empty() || keyword(message).has_value();
}

bool is_fix_message(std::string_view message, const LinkConfig &config) {
  return FixMatcher(config).is_fix(message);
}

std::vector<FixLink> link_fixes(const std::vector<CommitRecord> &commits,
                                const std::vector<BugTicket> &tickets, const LinkConfig &config) {
  FixMatcher matcher(config);
  std::unordered_map<std::string, std::size_t> eligible;
  for (std::size_t i = 0; i < tickets.size(); ++i) {
    const auto &t = tickets[i];
    if (t.is_closed() && (!config.require_defect_type || t.is_defect())) {
      eligible.emplace(t.ticket_id, i);
    }
  }

  std::vector<FixLink> links;
  for (const auto &commit : commits) {
    std::vector<std::pair<std::size_t, IdMention>> matched;
    for (auto &mention : matcher.ticket_mentions(commit.message)) {
      if (auto it = eligible.find(mention.ticket_id); it != eligible.end()) {
        matched.emplace_back(it->second, std::move(mention));
      }
    }
    std::sort(matched.begin(), matched.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    for (auto &[index, mention] : matched) {
      links.push_back(
          {commit.hash, mention.ticket_id, LinkMethod::ticket_id_match, mention.matched_text});
    }
    if (matched.empty() && config.keyword_fallback) {
      if (auto word = matcher.keyword(commit.message)) {
        links.push_back({commit.hash, std::nullopt, LinkMethod::keyword, *word});
      }
    }
  }
  return links;
}

} // namespace jitminer
