#include "jitminer/config.hpp"

#include "jitminer/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace jitminer {

namespace {

std::string_view trim(std::string_view s) {
  const auto *ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) {
    return {};
  }
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw Error(ErrorCode::ConfigError, "invalid value '" + std::string(value) + "' for " +
                                          std::string(key) + " (expected " + std::string(want) + ")");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(key, v, "a number");
  }
  return out;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    bad_value(key, v, "a non-negative integer");
  }
  return out;
}

int to_int(std::string_view key, std::string_view v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    bad_value(key, v, "an integer");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  std::string s(v);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    return true;
  }
  if (s == "false" || s == "0" || s == "no" || s == "off") {
    return false;
  }
  bad_value(key, v, "true or false");
}

using Setter = std::function<void(RunConfig &, std::string_view, std::string_view)>;

const std::map<std::string_view, Setter> &setters() {
  static const std::map<std::string_view, Setter> table{
      {"repo", [](RunConfig &c, auto, auto v) { c.repo_path = std::string(v); }},
      {"tickets", [](RunConfig &c, auto, auto v) { c.tickets_path = std::string(v); }},
      {"tickets_format",
       [](RunConfig &c, auto, auto v) { c.tickets_format = parse_ticket_format(v); }},
      {"output_dir", [](RunConfig &c, auto, auto v) { c.output_dir = std::string(v); }},
      {"jobs",
       [](RunConfig &c, auto k, auto v) {
         c.jobs = to_unsigned(k, v);
         c.szz.jobs = c.jobs;
         if (c.jobs < 1) {
           bad_value(k, v, "at least 1");
         }
       }},
      {"seed", [](RunConfig &c, auto k, auto v) { c.train.seed = to_unsigned(k, v); }},
      {"log_level", [](RunConfig &c, auto, auto v) { c.log_level = std::string(v); }},
      {"links", [](RunConfig &c, auto, auto v) { set_link_mode(c.links, v); }},
      {"require_defect_type",
       [](RunConfig &c, auto k, auto v) { c.links.require_defect_type = to_bool(k, v); }},
      {"partial_fix_rule",
       [](RunConfig &c, auto k, auto v) { c.szz.partial_fix_rule = to_bool(k, v); }},
      {"entropy_mode",
       [](RunConfig &c, auto, auto v) { c.metrics.entropy_mode = parse_entropy_mode(v); }},
      {"window_days",
       [](RunConfig &c, auto k, auto v) { c.metrics.window_days = to_double(k, v); }},
      {"la_ld_norm", [](RunConfig &c, auto, auto v) { c.metrics.la_ld_norm = parse_la_ld_norm(v); }},
      {"lt_norm", [](RunConfig &c, auto, auto v) { c.metrics.lt_norm = parse_lt_norm(v); }},
      {"nf_norm", [](RunConfig &c, auto, auto v) { c.metrics.nf_norm = parse_nf_norm(v); }},
      {"nuc_norm", [](RunConfig &c, auto, auto v) { c.metrics.nuc_norm = parse_nuc_norm(v); }},
      {"rexp_year_offset",
       [](RunConfig &c, auto k, auto v) { c.metrics.rexp_year_offset = to_int(k, v); }},
      {"epochs", [](RunConfig &c, auto k, auto v) { c.train.epochs = to_unsigned(k, v); }},
      {"learning_rate",
       [](RunConfig &c, auto k, auto v) { c.train.learning_rate = to_double(k, v); }},
      {"split_ratio", [](RunConfig &c, auto k, auto v) { c.train.split_ratio = to_double(k, v); }},
      {"hidden_width",
       [](RunConfig &c, auto k, auto v) { c.train.hidden_width = to_unsigned(k, v); }},
      {"layers", [](RunConfig &c, auto k, auto v) { c.train.layers = to_unsigned(k, v); }},
      {"threshold", [](RunConfig &c, auto k, auto v) { c.train.threshold = to_double(k, v); }},
      {"norm_fit", [](RunConfig &c, auto, auto v) { c.train.norm_fit = parse_norm_fit(v); }},
      {"features", [](RunConfig &c, auto, auto v) { c.train.feature_subset = split_list(v); }},
  };
  return table;
}

} // namespace

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(sep, start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    auto item = trim(text.substr(start, end - start));
    if (!item.empty()) {
      out.emplace_back(item);
    }
    start = end + 1;
  }
  return out;
}

std::vector<ConfigEntry> parse_config_text(std::string_view text) {
  std::vector<ConfigEntry> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;

    // strip a comment that is not inside quotes
    bool quoted = false;
    std::size_t cut = raw.size();
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') {
        quoted = !quoted;
      } else if (raw[i] == '#' && !quoted) {
        cut = i;
        break;
      }
    }
    auto line = trim(raw.substr(0, cut));
    if (line.empty() || (line.front() == '[' && line.back() == ']')) {
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, "expected key = value", line_no);
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::ConfigError, "missing key", line_no);
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    } else if (value.find('"') != std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, "unbalanced quote", line_no);
    }
    out.push_back({std::string(key), std::string(value), line_no});
  }
  return out;
}

std::vector<ConfigEntry> load_config_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::ConfigError, "cannot read config file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_setting(RunConfig &config, std::string_view key, std::string_view value) {
  const auto &table = setters();
  auto it = table.find(key);
  if (it == table.end()) {
    throw Error(ErrorCode::ConfigError, "unknown setting '" + std::string(key) + "'");
  }
  it->second(config, key, value);
}

const std::vector<std::string_view> &known_config_keys() {
  static const std::vector<std::string_view> keys = [] {
    std::vector<std::string_view> out;
    for (const auto &[key, setter] : setters()) {
      out.push_back(key);
    }
    return out;
  }();
  return keys;
}

void set_link_mode(LinkConfig &links, std::string_view mode) {
  if (mode == "id-only") {
    links.keyword_fallback = false;
  } else if (mode == "id+keyword") {
    links.keyword_fallback = true;
  } else {
    throw Error(ErrorCode::ConfigError,
                "invalid link mode '" + std::string(mode) + "' (expected id-only|id+keyword)");
  }
}

std::string_view link_mode(const LinkConfig &links) {
  return links.keyword_fallback ? "id+keyword" : "id-only";
}

} // namespace jitminer
