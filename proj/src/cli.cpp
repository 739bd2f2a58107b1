#include "jitminer/cli.hpp"

#include "jitminer/config.hpp"
#include "jitminer/dataset.hpp"
#include "jitminer/error.hpp"
#include "jitminer/history.hpp"
#include "jitminer/model.hpp"

#include "CLI11.hpp"

#include <spdlog/fmt/fmt.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

namespace jitminer {

namespace {

constexpr std::string_view kReproductionNote =
    "SZZ labels depend on blame heuristics, linking rules and history shape; figures derived "
    "from them are not guaranteed to match other SZZ implementations exactly.";

// Option values collected as text and applied through apply_setting after the
// config file, so the command line always wins.
struct Settings {
  std::map<std::string, std::string> values;
  std::vector<std::pair<CLI::Option *, std::string>> options;
  std::string config_path;

  void add(CLI::App *app, const std::string &flag, const std::string &key,
           const std::string &help) {
    options.emplace_back(app->add_option(flag, values[key], help), key);
  }

  RunConfig resolve() const {
    RunConfig config;
    if (!config_path.empty()) {
      for (const auto &entry : load_config_file(config_path)) {
        try {
          apply_setting(config, entry.key, entry.value);
        } catch (const Error &e) {
          throw Error(ErrorCode::ConfigError,
                      config_path + ":" + std::to_string(entry.line) + ": " + e.what());
        }
      }
    }
    for (const auto &[option, key] : options) {
      if (option->count() > 0) {
        apply_setting(config, key, values.at(key));
      }
    }
    config.metrics.validate();
    config.links.validate();
    return config;
  }
};

void add_common(CLI::App *app, Settings &s) {
  app->add_option("--config", s.config_path, "key=value settings file");
  s.add(app, "--jobs", "jobs", "worker threads");
  s.add(app, "--seed", "seed", "random seed (default 42)");
}

void add_metric_options(CLI::App *app, Settings &s) {
  s.add(app, "--entropy-mode", "entropy_mode", "per_commit|windowed");
  s.add(app, "--window-days", "window_days", "window for windowed entropy");
  s.add(app, "--la-ld-norm", "la_ld_norm", "raw|by_new_file_size|by_lt");
  s.add(app, "--lt-norm", "lt_norm", "raw|by_nf");
  s.add(app, "--nf-norm", "nf_norm", "raw|by_repo_file_count");
  s.add(app, "--nuc-norm", "nuc_norm", "raw|by_nf");
  s.add(app, "--rexp-year-offset", "rexp_year_offset", "-1, 0 or 1");
}

void add_train_options(CLI::App *app, Settings &s) {
  s.add(app, "--features", "features", "comma separated feature columns");
  s.add(app, "--epochs", "epochs", "training epochs (default 3500)");
  s.add(app, "--lr", "learning_rate", "Adam learning rate (default 0.001)");
  s.add(app, "--split", "split_ratio", "training share (default 0.7)");
  s.add(app, "--hidden-width", "hidden_width", "hidden layer width (default 32)");
  s.add(app, "--layers", "layers", "weight layers including the output (default 9)");
  s.add(app, "--norm-fit", "norm_fit", "train|full");
  s.add(app, "--threshold", "threshold", "decision threshold (default 0.5)");
}

void configure_logging(const std::string &level) {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("jitminer");
    logger->set_pattern("%^%l%$: %v");
    spdlog::set_default_logger(logger);
  });
  spdlog::set_level(spdlog::level::from_str(level));
}

std::string utc_now() {
  auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  auto days = std::chrono::floor<std::chrono::days>(now);
  std::chrono::year_month_day ymd{days};
  std::chrono::hh_mm_ss hms{now - days};
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw Error(ErrorCode::IoError, "write failed for " + path.string());
  }
}

nlohmann::json metrics_config_json(const MetricsConfig &m) {
  return {
      {"entropy_mode", std::string(to_string(m.entropy_mode))},
      {"window_days", m.window_days},
      {"la_ld_norm", std::string(to_string(m.la_ld_norm))},
      {"lt_norm", std::string(to_string(m.lt_norm))},
      {"nf_norm", std::string(to_string(m.nf_norm))},
      {"nuc_norm", std::string(to_string(m.nuc_norm))},
      {"rexp_year_offset", m.rexp_year_offset},
  };
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int cmd_mine(const RunConfig &config, const std::string &pairs_out, bool stamp,
             std::ostream &out) {
  if (config.repo_path.empty()) {
    throw UsageError("mine: --repo is required");
  }
  if (config.tickets_path.empty()) {
    throw UsageError("mine: --tickets is required");
  }
  auto repo = Repository::open(config.repo_path);
  auto tickets = load_ticket_export(config.tickets_path, config.tickets_format);
  for (const auto &w : tickets.warnings) {
    spdlog::warn("tracker: {}", w);
  }
  auto commits = repo.list_commits();
  std::vector<std::string> warnings = tickets.warnings;
  if (commits.empty()) {
    spdlog::warn("vcs: repository has no commits; writing an empty dataset");
    warnings.emplace_back("repository has no commits");
  }
  spdlog::info("mining {} commits with {} jobs", commits.size(), config.jobs);

  auto links = link_fixes(commits, tickets.tickets, config.links);
  auto mined = mine_commits(repo, commits, config.jobs);

  DiffCache cache;
  for (const auto &m : mined) {
    if (!m.error) {
      cache.emplace(m.commit.hash, m.deltas);
    }
  }
  SzzConfig szz_config = config.szz;
  szz_config.jobs = config.jobs;
  auto szz = run_szz(repo, commits, links, tickets.tickets, szz_config, &cache);
  cache.clear();
  warnings.insert(warnings.end(), szz.warnings.begin(), szz.warnings.end());

  HistoryIndex index(std::move(mined));
  auto labels = LabelLookup::from(szz, links);
  auto matrix = extract_feature_matrix(index, labels, config.metrics, config.jobs);
  std::size_t invalid = 0;
  for (const auto &row : matrix.rows) {
    if (!row.valid()) {
      ++invalid;
      warnings.push_back("commit " + row.commit_hash + " excluded: " + *row.invalid_reason);
    }
  }

  std::filesystem::create_directories(config.output_dir);
  auto rows = export_csv(matrix, config.output_dir / "dataset.csv");

  std::string jsonl;
  for (const auto &pair : szz.pairs) {
    jsonl += pair_to_json(pair).dump() + "\n";
  }
  auto pairs_path = pairs_out.empty() ? config.output_dir / "pairs.jsonl"
                                      : std::filesystem::path(pairs_out);
  if (pairs_path.has_parent_path()) {
    std::filesystem::create_directories(pairs_path.parent_path());
  }
  write_text(pairs_path, jsonl);

  nlohmann::json summary = {
      {"tool", "jitminer"},
      {"seed", config.train.seed},
      {"repository", {{"default_branch", repo.default_branch()}, {"commits", commits.size()}}},
      {"tickets", tickets.tickets.size()},
      {"fix_links", links.size()},
      {"links", std::string(link_mode(config.links))},
      {"pairs", szz.pairs.size()},
      {"rows", rows},
      {"invalid_rows", invalid},
      {"metrics", metrics_config_json(config.metrics)},
      {"note", kReproductionNote},
  };
  if (rows > 0) {
    auto stats = summarize(matrix);
    stats.period = std::make_pair(commits.front().timestamp, commits.back().timestamp);
    summary["dataset"] = to_json(stats);
  }
  summary["extensions"] = to_json(extension_report(index, labels));
  summary["warnings"] = warnings;
  if (stamp) {
    summary["generated_at"] = utc_now();
  }
  write_text(config.output_dir / "summary.json", summary.dump(2) + "\n");

  out << fmt::format("{} commits, {} fix links, {} inducing pairs, {} rows written to {}\n",
                     commits.size(), links.size(), szz.pairs.size(), rows,
                     config.output_dir.string());
  return kExitOk;
}

int cmd_stats(const RunConfig &config, const std::string &data, bool json, std::ostream &out) {
  auto matrix = import_csv(data);
  auto stats = summarize(matrix);
  std::optional<ExtensionReport> extensions;
  if (!config.repo_path.empty()) {
    auto repo = Repository::open(config.repo_path);
    std::vector<std::vector<std::string>> changes;
    for (const auto &row : matrix.rows) {
      if (row.defective) {
        std::vector<std::string> paths;
        for (const auto &d : repo.commit_diff(row.commit_hash)) {
          paths.push_back(d.path);
        }
        changes.push_back(std::move(paths));
      }
    }
    extensions = extension_report(changes);
  }
  if (json) {
    nlohmann::json j = {{"summary", to_json(stats)}};
    if (extensions) {
      j["extensions"] = to_json(*extensions);
    }
    out << j.dump(2) << '\n';
  } else {
    out << format_summary_table(stats);
    if (extensions) {
      out << '\n' << format_extension_table(*extensions);
    }
  }
  return kExitOk;
}

int cmd_train(const RunConfig &config, const std::string &data, const std::string &model_out,
              bool json, bool stamp, std::ostream &out) {
  auto matrix = import_csv(data);
  auto result = train(matrix, config.train);
  save_model(result.model, model_out);
  nlohmann::json report = {
      {"seed", config.train.seed},
      {"train_rows", result.train_rows},
      {"test_rows", result.test_rows},
      {"final_loss", result.loss_history.empty() ? 0.0 : result.loss_history.back()},
      {"test", to_json(result.test_metrics)},
      {"model", model_out},
  };
  if (stamp) {
    report["generated_at"] = utc_now();
  }
  if (json) {
    out << report.dump(2) << '\n';
  } else {
    const auto &m = result.test_metrics;
    out << fmt::format("trained on {} rows, tested on {} rows (seed {})\n", result.train_rows,
                       result.test_rows, config.train.seed);
    out << fmt::format("recall {:.4f}  precision {:.4f}  f1 {:.4f}  loss {:.6f}\n", m.recall,
                       m.precision, m.f1, m.mean_loss);
    out << fmt::format("tp {}  fp {}  tn {}  fn {}\n", m.tp, m.fp, m.tn, m.fn);
    out << "model written to " << model_out << '\n';
  }
  return kExitOk;
}

int cmd_eval(const std::string &model_path, const std::string &data, std::optional<double> threshold,
             bool json, std::ostream &out) {
  auto model = load_model(model_path);
  if (threshold) {
    model.config.threshold = *threshold;
  }
  auto m = evaluate_model(model, import_csv(data));
  if (json) {
    out << to_json(m).dump(2) << '\n';
  } else {
    out << fmt::format("recall {:.4f}  precision {:.4f}  f1 {:.4f}  loss {:.6f}\n", m.recall,
                       m.precision, m.f1, m.mean_loss);
    out << fmt::format("tp {}  fp {}  tn {}  fn {}\n", m.tp, m.fp, m.tn, m.fn);
  }
  return kExitOk;
}

int cmd_ablate(const RunConfig &config, const std::string &data, bool json, std::ostream &out) {
  auto matrix = import_csv(data);
  auto report = ablate(matrix, config.train.feature_subset, config.train, config.jobs);
  if (json) {
    auto j = to_json(report);
    j["seed"] = config.train.seed;
    out << j.dump(2) << '\n';
  } else {
    out << fmt::format("{:<12} {:>8} {:>10}\n", "removed", "recall", "loss");
    for (const auto &row : report.rows) {
      out << fmt::format("{:<12} {:>8.4f} {:>10.6f}\n", row.removed.value_or("(none)"), row.recall,
                         row.mean_loss);
    }
  }
  return kExitOk;
}

int cmd_lines(const RunConfig &config, const std::string &pairs_path, const std::string &spec,
              std::ostream &out) {
  if (config.repo_path.empty()) {
    throw UsageError("lines: --repo is required");
  }
  auto pairs = load_pairs(pairs_path);
  const auto &pair = find_pair(pairs, spec);
  auto repo = Repository::open(config.repo_path);
  auto lines = defect_lines(repo, pair);
  out << fmt::format("inducing {}\nfix      {}\n", pair.inducing_hash, pair.fix_hash);
  if (lines.empty()) {
    out << "no defect lines attributable to this pair\n";
    return kExitOk;
  }
  std::map<std::string, std::vector<std::size_t>> by_path;
  for (const auto &ref : lines) {
    by_path[ref.path].push_back(ref.line_no);
  }
  for (const auto &[path, numbers] : by_path) {
    auto text = repo.read_file_at(pair.inducing_hash, path).value_or("");
    std::vector<std::string> file_lines;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) {
      file_lines.push_back(l);
    }
    for (auto n : numbers) {
      out << fmt::format("\n{}:{}\n", path, n);
      std::size_t from = n > 2 ? n - 2 : 1;
      std::size_t to = std::min(file_lines.size(), n + 2);
      for (std::size_t k = from; k <= to; ++k) {
        out << fmt::format("{} {:>6} | {}\n", k == n ? '>' : ' ', k, file_lines[k - 1]);
      }
    }
  }
  return kExitOk;
}

int cmd_normalize(const std::string &data, const std::string &output, const std::string &columns,
                  bool json, std::ostream &out) {
  auto matrix = import_csv(data);
  auto names = columns.empty() ? numeric_feature_names() : split_list(columns);
  auto normalized = min_max_normalize(matrix, names);
  export_csv(normalized, output);
  nlohmann::json ranges = nlohmann::json::object();
  for (const auto &[name, range] : normalized.normalization) {
    ranges[name] = {{"min", range.min}, {"max", range.max}};
  }
  if (json) {
    out << nlohmann::json{{"rows", normalized.rows.size()}, {"ranges", ranges}}.dump(2) << '\n';
  } else {
    out << fmt::format("{} rows normalized into {}\n", normalized.rows.size(), output);
  }
  return kExitOk;
}

} // namespace

nlohmann::json pair_to_json(const InducingPair &pair) {
  nlohmann::json evidence = nlohmann::json::array();
  for (const auto &ref : pair.evidence) {
    evidence.push_back({{"path", ref.path}, {"line", ref.line_no}});
  }
  return {
      {"inducing", pair.inducing_hash},
      {"fix", pair.fix_hash},
      {"ticket", pair.ticket_id ? nlohmann::json(*pair.ticket_id) : nlohmann::json(nullptr)},
      {"partial_fix", pair.partial_fix},
      {"evidence", evidence},
  };
}

InducingPair pair_from_json(const nlohmann::json &j) {
  InducingPair pair;
  try {
    pair.inducing_hash = j.at("inducing").get<std::string>();
    pair.fix_hash = j.at("fix").get<std::string>();
    if (j.contains("ticket") && !j.at("ticket").is_null()) {
      pair.ticket_id = j.at("ticket").get<std::string>();
    }
    pair.partial_fix = j.value("partial_fix", false);
    if (j.contains("evidence")) {
      for (const auto &e : j.at("evidence")) {
        pair.evidence.push_back(
            {e.at("path").get<std::string>(), e.at("line").get<std::size_t>(), Side::old_side});
      }
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::UnknownPair, std::string("malformed pair record: ") + e.what());
  }
  return pair;
}

std::vector<InducingPair> load_pairs(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot read " + path.string());
  }
  std::vector<InducingPair> pairs;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      pairs.push_back(pair_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error &e) {
      throw Error(ErrorCode::UnknownPair, std::string("pairs file is not JSONL: ") + e.what(),
                  line_no);
    }
  }
  return pairs;
}

const InducingPair &find_pair(const std::vector<InducingPair> &pairs, std::string_view spec) {
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), index);
    if (ec != std::errc{} || ptr != spec.data() + spec.size() || spec.empty()) {
      throw Error(ErrorCode::UnknownPair, "pair id '" + std::string(spec) +
                                              "' is neither an index nor inducing:fix");
    }
    if (index >= pairs.size()) {
      throw Error(ErrorCode::UnknownPair, fmt::format("pair index {} out of range ({} pairs)",
                                                      index, pairs.size()));
    }
    return pairs[index];
  }
  auto inducing = spec.substr(0, colon);
  auto fix = spec.substr(colon + 1);
  const InducingPair *found = nullptr;
  for (const auto &pair : pairs) {
    if (!inducing.empty() && !fix.empty() && pair.inducing_hash.starts_with(inducing) &&
        pair.fix_hash.starts_with(fix)) {
      if (found != nullptr && (found->inducing_hash != pair.inducing_hash ||
                               found->fix_hash != pair.fix_hash)) {
        throw Error(ErrorCode::UnknownPair, "pair id '" + std::string(spec) + "' is ambiguous");
      }
      if (found == nullptr) {
        found = &pair;
      }
    }
  }
  if (found == nullptr) {
    throw Error(ErrorCode::UnknownPair, "no pair matches '" + std::string(spec) + "'");
  }
  return *found;
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Mine labeled just-in-time defect datasets from git history and train a "
               "baseline classifier.",
               "jitminer"};
  app.require_subcommand(1);
  std::string log_level;
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->envname("JITMINER_LOG");

  Settings mine_s;
  auto *mine = app.add_subcommand("mine", "build dataset.csv, pairs.jsonl and summary.json");
  add_common(mine, mine_s);
  mine_s.add(mine, "--repo", "repo", "local git clone");
  mine_s.add(mine, "--tickets", "tickets", "ticket export file");
  mine_s.add(mine, "--tickets-format", "tickets_format", "csv|json");
  mine_s.add(mine, "--out", "output_dir", "output directory (default .)");
  mine_s.add(mine, "--links", "links", "id-only|id+keyword");
  mine_s.add(mine, "--require-defect-type", "require_defect_type",
             "only link tickets typed as defects");
  mine_s.add(mine, "--partial-fix-rule", "partial_fix_rule", "keep post-report fixes (true)");
  add_metric_options(mine, mine_s);
  std::string mine_pairs_out;
  mine->add_option("--pairs-out", mine_pairs_out, "pairs audit file (default <out>/pairs.jsonl)");
  bool mine_stamp = false;
  mine->add_flag("--stamp", mine_stamp, "embed a generation timestamp in summary.json");

  Settings stats_s;
  auto *stats = app.add_subcommand("stats", "dataset overview and feature statistics");
  add_common(stats, stats_s);
  std::string stats_data;
  bool stats_json = false;
  stats->add_option("--data", stats_data, "dataset CSV")->required();
  stats->add_flag("--json", stats_json, "machine-readable output");
  stats_s.add(stats, "--repo", "repo", "repository for the file-extension report");

  Settings train_s;
  auto *train_cmd = app.add_subcommand("train", "train and test the classifier");
  add_common(train_cmd, train_s);
  add_train_options(train_cmd, train_s);
  std::string train_data;
  std::string model_out = "model.json";
  bool train_json = false;
  bool train_stamp = false;
  train_cmd->add_option("--data", train_data, "dataset CSV")->required();
  train_cmd->add_option("--model-out", model_out, "model file (default model.json)");
  train_cmd->add_flag("--json", train_json, "machine-readable output");
  train_cmd->add_flag("--stamp", train_stamp, "embed a timestamp in the report");

  Settings eval_s;
  auto *eval_cmd = app.add_subcommand("eval", "evaluate a saved model on a dataset");
  add_common(eval_cmd, eval_s);
  std::string eval_model;
  std::string eval_data;
  std::optional<double> eval_threshold;
  bool eval_json = false;
  eval_cmd->add_option("--model", eval_model, "model file")->required();
  eval_cmd->add_option("--data", eval_data, "dataset CSV")->required();
  eval_cmd->add_option("--threshold", eval_threshold, "decision threshold");
  eval_cmd->add_flag("--json", eval_json, "machine-readable output");

  Settings ablate_s;
  auto *ablate_cmd = app.add_subcommand("ablate", "leave-one-feature-out study");
  add_common(ablate_cmd, ablate_s);
  add_train_options(ablate_cmd, ablate_s);
  std::string ablate_data;
  bool ablate_json = false;
  ablate_cmd->add_option("--data", ablate_data, "dataset CSV")->required();
  ablate_cmd->add_flag("--json", ablate_json, "machine-readable output");

  Settings lines_s;
  auto *lines_cmd = app.add_subcommand("lines", "show the defect lines behind a pair");
  add_common(lines_cmd, lines_s);
  std::string pairs_path;
  std::string pair_spec;
  lines_cmd->add_option("--pairs", pairs_path, "pairs.jsonl")->required();
  lines_cmd->add_option("--pair", pair_spec, "index or inducing:fix")->required();
  lines_s.add(lines_cmd, "--repo", "repo", "local git clone");

  Settings norm_s;
  auto *norm_cmd = app.add_subcommand("normalize", "min-max normalize a dataset");
  add_common(norm_cmd, norm_s);
  std::string norm_data;
  std::string norm_out;
  std::string norm_columns;
  bool norm_json = false;
  norm_cmd->add_option("--data", norm_data, "dataset CSV")->required();
  norm_cmd->add_option("--out", norm_out, "output CSV")->required();
  norm_cmd->add_option("--columns", norm_columns, "columns to normalize (default all numeric)");
  norm_cmd->add_flag("--json", norm_json, "print the fitted ranges as JSON");

  std::vector<std::string> argv_storage{"jitminer"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char *> argv;
  for (auto &a : argv_storage) {
    argv.push_back(a.data());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    auto *sub = app.get_subcommands().front();
    Settings *settings = sub == mine       ? &mine_s
                         : sub == stats    ? &stats_s
                         : sub == train_cmd ? &train_s
                         : sub == eval_cmd  ? &eval_s
                         : sub == ablate_cmd ? &ablate_s
                         : sub == lines_cmd  ? &lines_s
                                             : &norm_s;
    RunConfig config;
    try {
      config = settings->resolve();
      config.train.validate();
    } catch (const Error &e) {
      if (e.code() == ErrorCode::ConfigError) {
        throw UsageError(e.what());
      }
      throw;
    }
    configure_logging(log_level.empty() ? config.log_level : log_level);

    if (sub == mine) return cmd_mine(config, mine_pairs_out, mine_stamp, out);
    if (sub == stats) return cmd_stats(config, stats_data, stats_json, out);
    if (sub == train_cmd) return cmd_train(config, train_data, model_out, train_json, train_stamp, out);
    if (sub == eval_cmd) return cmd_eval(eval_model, eval_data, eval_threshold, eval_json, out);
    if (sub == ablate_cmd) return cmd_ablate(config, ablate_data, ablate_json, out);
    if (sub == lines_cmd) return cmd_lines(config, pairs_path, pair_spec, out);
    return cmd_normalize(norm_data, norm_out, norm_columns, norm_json, out);
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int run_cli(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

} // namespace jitminer
