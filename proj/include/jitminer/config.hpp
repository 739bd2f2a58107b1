#pragma once

#include "jitminer/metrics.hpp"
#include "jitminer/model.hpp"
#include "jitminer/szz.hpp"
#include "jitminer/tracker.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace jitminer {

struct RunConfig {
  std::filesystem::path repo_path;
  std::filesystem::path tickets_path;
  TicketFormat tickets_format = TicketFormat::csv;
  std::filesystem::path output_dir = ".";
  MetricsConfig metrics;
  LinkConfig links;
  SzzConfig szz;
  TrainConfig train;
  std::size_t jobs = 1;
  std::string log_level = "info";
};

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

// `key = value` per line. '#' starts a comment outside quotes, values may be
// wrapped in double quotes, `[section]` headers are accepted and ignored.
// Error(ConfigError) with the line number on anything else.
std::vector<ConfigEntry> parse_config_text(std::string_view text);
std::vector<ConfigEntry> load_config_file(const std::filesystem::path &path);

// Keys mirror the struct field names (entropy_mode, window_days, epochs,
// learning_rate, ...). See known_config_keys().
void apply_setting(RunConfig &config, std::string_view key, std::string_view value);
const std::vector<std::string_view> &known_config_keys();

// "id-only" or "id+keyword".
void set_link_mode(LinkConfig &links, std::string_view mode);
std::string_view link_mode(const LinkConfig &links);

std::vector<std::string> split_list(std::string_view text, char sep = ',');

} // namespace jitminer
