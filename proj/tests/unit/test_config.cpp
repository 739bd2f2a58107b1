#include "fixture.hpp"

#include "jitminer/config.hpp"
#include "jitminer/error.hpp"

#include <gtest/gtest.h>

using namespace jitminer;

TEST(ConfigText, ParsesEntriesCommentsAndQuotes) {
  auto entries = parse_config_text("# run settings\n"
                                   "[metrics]\n"
                                   "entropy_mode = windowed   # trailing comment\n"
                                   "\n"
                                   "repo = \"/tmp/with # hash\"\r\n"
                                   "features=la, ld ,nf\n");
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[0].key, "entropy_mode");
  EXPECT_EQ(entries[0].value, "windowed");
  EXPECT_EQ(entries[0].line, 3u);
  EXPECT_EQ(entries[1].value, "/tmp/with # hash");
  EXPECT_EQ(entries[2].line, 6u);
}

TEST(ConfigText, ErrorsCarryLineNumbers) {
  auto line_of = [](std::string_view text) -> std::optional<std::size_t> {
    try {
      (void)parse_config_text(text);
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::ConfigError);
      return e.location();
    }
    return std::nullopt;
  };
  EXPECT_EQ(line_of("a = 1\njust words\n"), 2u);
  EXPECT_EQ(line_of("= 1\n"), 1u);
  EXPECT_EQ(line_of("a = 1\nb = 2\nc = \"open\n"), 3u);
  test::TempDir dir;
  EXPECT_THROW((void)load_config_file(dir.path() / "none.toml"), Error);
}

TEST(ConfigApply, SetsEveryKnownKey) {
  RunConfig c;
  const std::vector<std::pair<std::string, std::string>> settings{
      {"repo", "/r"},
      {"tickets", "/t.json"},
      {"tickets_format", "json"},
      {"output_dir", "out"},
      {"jobs", "4"},
      {"seed", "7"},
      {"log_level", "debug"},
      {"links", "id-only"},
      {"require_defect_type", "true"},
      {"partial_fix_rule", "off"},
      {"entropy_mode", "windowed"},
      {"window_days", "7.5"},
      {"la_ld_norm", "by_new_file_size"},
      {"lt_norm", "by_nf"},
      {"nf_norm", "raw"},
      {"nuc_norm", "by_nf"},
      {"rexp_year_offset", "-1"},
      {"epochs", "10"},
      {"learning_rate", "0.01"},
      {"split_ratio", "0.8"},
      {"hidden_width", "16"},
      {"layers", "4"},
      {"threshold", "0.3"},
      {"norm_fit", "full"},
      {"features", "la,ld"},
  };
  for (const auto &[k, v] : settings) {
    apply_setting(c, k, v);
  }
  EXPECT_EQ(known_config_keys().size(), settings.size());
  EXPECT_EQ(c.repo_path, "/r");
  EXPECT_EQ(c.tickets_format, TicketFormat::json);
  EXPECT_EQ(c.output_dir, "out");
  EXPECT_EQ(c.jobs, 4u);
  EXPECT_EQ(c.szz.jobs, 4u);
  EXPECT_EQ(c.train.seed, 7u);
  EXPECT_EQ(c.log_level, "debug");
  EXPECT_FALSE(c.links.keyword_fallback);
  EXPECT_EQ(link_mode(c.links), "id-only");
  EXPECT_TRUE(c.links.require_defect_type);
  EXPECT_FALSE(c.szz.partial_fix_rule);
  EXPECT_EQ(c.metrics.entropy_mode, EntropyMode::windowed);
  EXPECT_EQ(c.metrics.window_days, 7.5);
  EXPECT_EQ(c.metrics.la_ld_norm, LaLdNorm::by_new_file_size);
  EXPECT_EQ(c.metrics.lt_norm, LtNorm::by_nf);
  EXPECT_EQ(c.metrics.nf_norm, NfNorm::raw);
  EXPECT_EQ(c.metrics.nuc_norm, NucNorm::by_nf);
  EXPECT_EQ(c.metrics.rexp_year_offset, -1);
  EXPECT_EQ(c.train.epochs, 10u);
  EXPECT_EQ(c.train.learning_rate, 0.01);
  EXPECT_EQ(c.train.split_ratio, 0.8);
  EXPECT_EQ(c.train.hidden_width, 16u);
  EXPECT_EQ(c.train.layers, 4u);
  EXPECT_EQ(c.train.threshold, 0.3);
  EXPECT_EQ(c.train.norm_fit, NormFit::full);
  EXPECT_EQ(c.train.feature_subset, (std::vector<std::string>{"la", "ld"}));
}

TEST(ConfigApply, RejectsUnknownKeysAndBadValues) {
  RunConfig c;
  auto code = [&](std::string_view k, std::string_view v) {
    try {
      apply_setting(c, k, v);
    } catch (const Error &e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  EXPECT_EQ(code("colour", "blue"), ErrorCode::ConfigError);
  EXPECT_EQ(code("epochs", "many"), ErrorCode::ConfigError);
  EXPECT_EQ(code("epochs", "-3"), ErrorCode::ConfigError);
  EXPECT_EQ(code("learning_rate", "nan"), ErrorCode::ConfigError);
  EXPECT_EQ(code("require_defect_type", "maybe"), ErrorCode::ConfigError);
  EXPECT_EQ(code("links", "all"), ErrorCode::ConfigError);
  EXPECT_EQ(code("jobs", "0"), ErrorCode::ConfigError);
  EXPECT_EQ(code("nf_norm", "by_magic"), ErrorCode::ConfigError);
  EXPECT_EQ(code("tickets_format", "xml"), ErrorCode::ConfigError);
}

TEST(ConfigDefaults, MatchDocumentedValues) {
  RunConfig c;
  EXPECT_EQ(c.metrics.entropy_mode, EntropyMode::per_commit);
  EXPECT_EQ(c.metrics.window_days, 14);
  EXPECT_EQ(c.metrics.nf_norm, NfNorm::by_repo_file_count);
  EXPECT_EQ(c.metrics.la_ld_norm, LaLdNorm::raw);
  EXPECT_EQ(c.metrics.lt_norm, LtNorm::raw);
  EXPECT_EQ(c.metrics.nuc_norm, NucNorm::raw);
  EXPECT_EQ(c.metrics.rexp_year_offset, 0);
  EXPECT_EQ(c.train.epochs, 3500u);
  EXPECT_EQ(c.train.learning_rate, 0.001);
  EXPECT_EQ(c.train.split_ratio, 0.7);
  EXPECT_EQ(c.train.layers, 9u);
  EXPECT_EQ(c.train.threshold, 0.5);
  EXPECT_EQ(c.train.feature_subset.size(), 14u);
  EXPECT_TRUE(c.links.keyword_fallback);
  EXPECT_FALSE(c.links.require_defect_type);
  EXPECT_TRUE(c.szz.partial_fix_rule);
}

TEST(SplitList, TrimsAndDropsEmpties) {
  EXPECT_EQ(split_list(" a , b,,c "), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(split_list("").empty());
  EXPECT_EQ(split_list("x;y", ';'), (std::vector<std::string>{"x", "y"}));
}
