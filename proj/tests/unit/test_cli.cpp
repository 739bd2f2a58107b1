#include "fixture.hpp"
#include "model_checks.hpp"

#include "jitminer/cli.hpp"
#include "jitminer/dataset.hpp"
#include "jitminer/error.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace jitminer;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path write_dataset(const fs::path &dir, std::size_t rows, std::uint64_t seed) {
  auto path = dir / "data.csv";
  export_csv(test::separable_dataset(rows, 0.3, seed), path);
  return path;
}

const std::vector<std::string> kQuick{"--epochs", "30", "--layers", "3", "--hidden-width", "8",
                                      "--lr", "0.01"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string> &b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

} // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"stats"}).code, kExitUsage);
  EXPECT_EQ(cli({"mine", "--tickets", "t.csv"}).code, kExitUsage);
  test::TempDir dir;
  auto data = write_dataset(dir.path(), 40, 1);
  auto r = cli({"train", "--data", data.string(), "--split", "1.5"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("usage error"), std::string::npos);
  EXPECT_EQ(cli({"mine", "--repo", ".", "--tickets", "t", "--rexp-year-offset", "3"}).code,
            kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(Cli, RuntimeErrorsExitOne) {
  test::TempDir dir;
  auto r = cli({"stats", "--data", (dir.path() / "missing.csv").string()});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  test::write_text_file(dir.path() / "bad.csv", "commit,ns\n");
  EXPECT_EQ(cli({"stats", "--data", (dir.path() / "bad.csv").string()}).code, kExitFailure);
  test::write_text_file(dir.path() / "t.csv", "id,type,status,time\n");
  EXPECT_EQ(cli({"mine", "--repo", dir.path().string(), "--tickets",
                 (dir.path() / "t.csv").string()})
                .code,
            kExitFailure);
}

TEST(Cli, MineMatchesGoldenDataset) {
  test::GoldenFixture f;
  test::build_golden_fixture(f);
  auto out = f.work.path() / "out";
  auto r = cli({"mine", "--repo", f.repo.root().string(), "--tickets", f.tickets_path.string(),
                "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto expected = test::substitute(test::read_text(test::data_dir() / "golden" / "dataset.csv"),
                                   f.hash);
  EXPECT_EQ(test::read_text(out / "dataset.csv"), expected);

  auto pairs = load_pairs(out / "pairs.jsonl");
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].inducing_hash, f.hash["G2"]);
  EXPECT_EQ(pairs[0].fix_hash, f.hash["G3"]);

  auto summary = nlohmann::json::parse(test::read_text(out / "summary.json"));
  EXPECT_EQ(summary["rows"], 3);
  EXPECT_EQ(summary["pairs"], 1);
  EXPECT_FALSE(summary.contains("generated_at"));
  EXPECT_EQ(summary["dataset"]["period"]["first"], test::kBase);

  auto stats = cli({"stats", "--data", (out / "dataset.csv").string(), "--json"});
  ASSERT_EQ(stats.code, kExitOk) << stats.err;
  auto got = nlohmann::json::parse(stats.out)["summary"];
  auto want = nlohmann::json::parse(test::read_text(test::data_dir() / "golden" / "stats.json"));
  EXPECT_EQ(got["rows"], want["rows"]);
  EXPECT_EQ(got["defective"], want["defective"]);
  EXPECT_EQ(got["fix"], want["fix"]);
  for (const auto &[name, w] : want["features"].items()) {
    for (const auto *k : {"min", "max", "mean", "stddev"}) {
      EXPECT_NEAR(got["features"][name][k].get<double>(), w[k].get<double>(), 1e-6)
          << name << "." << k;
    }
  }
  auto table = cli({"stats", "--data", (out / "dataset.csv").string(), "--repo",
                    f.repo.root().string()});
  ASSERT_EQ(table.code, kExitOk) << table.err;
  EXPECT_NE(table.out.find("py"), std::string::npos);
}

TEST(Cli, MineOnEmptyRepositoryWritesHeaderOnly) {
  test::FixtureRepo repo;
  test::TempDir work;
  test::write_text_file(work.path() / "t.csv", "id,type,status,time\n");
  auto out = work.path() / "o";
  auto r = cli({"mine", "--repo", repo.root().string(), "--tickets",
                (work.path() / "t.csv").string(), "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(test::read_text(out / "dataset.csv"),
            "commit,ns,nd,nf,entropy,la,ld,lt,fix,ndev,age,nuc,exp,rexp,sexp,defective\n");
  EXPECT_EQ(test::read_text(out / "pairs.jsonl"), "");
  auto summary = nlohmann::json::parse(test::read_text(out / "summary.json"));
  EXPECT_EQ(summary["rows"], 0);
  EXPECT_FALSE(summary["warnings"].empty());
}

TEST(Cli, CommandLineOverridesConfigFile) {
  test::GoldenFixture f;
  test::build_golden_fixture(f);
  auto conf = f.work.path() / "run.conf";
  test::write_text_file(conf, "nf_norm = raw\nentropy_mode = windowed\nwindow_days = 1\n");
  auto out = f.work.path() / "o";
  auto r = cli({"mine", "--config", conf.string(), "--repo", f.repo.root().string(), "--tickets",
                f.tickets_path.string(), "--out", out.string(), "--entropy-mode", "per_commit"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(out / "pairs.jsonl"));
  auto summary = nlohmann::json::parse(test::read_text(out / "summary.json"));
  EXPECT_EQ(summary["metrics"]["nf_norm"], "raw");
  EXPECT_EQ(summary["metrics"]["entropy_mode"], "per_commit");
  auto m = import_csv(out / "dataset.csv");
  EXPECT_EQ(m.rows[0].nf, 2); // raw file count
  EXPECT_NEAR(m.rows[0].entropy, 0.918296, 1e-9);

  auto audit = f.work.path() / "audit" / "p.jsonl";
  ASSERT_EQ(cli({"mine", "--repo", f.repo.root().string(), "--tickets", f.tickets_path.string(),
                 "--out", (f.work.path() / "o2").string(), "--pairs-out", audit.string()})
                .code,
            kExitOk);
  EXPECT_EQ(load_pairs(audit).size(), 1u);
  EXPECT_FALSE(fs::exists(f.work.path() / "o2" / "pairs.jsonl"));

  test::write_text_file(conf, "epochs = lots\n");
  auto bad = cli({"mine", "--config", conf.string(), "--repo", f.repo.root().string(),
                  "--tickets", f.tickets_path.string()});
  EXPECT_EQ(bad.code, kExitUsage);
  EXPECT_NE(bad.err.find(":1:"), std::string::npos) << bad.err;
}

TEST(Cli, LinesShowsDefectLines) {
  test::SzzFixture f;
  test::build_szz_fixture(f);
  auto out = f.work.path() / "o";
  ASSERT_EQ(cli({"mine", "--repo", f.repo.root().string(), "--tickets",
                 f.tickets_path.string(), "--out", out.string(), "--jobs", "2"})
                .code,
            kExitOk);
  const auto &p = f.planted[0];
  auto r = cli({"lines", "--repo", f.repo.root().string(), "--pairs",
                (out / "pairs.jsonl").string(), "--pair",
                p.inducing.substr(0, 10) + ":" + p.fix.substr(0, 10)});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto marker = p.defect_line.path + ":" + std::to_string(p.defect_line.line_no);
  EXPECT_NE(r.out.find(marker), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(">"), std::string::npos);

  auto missing = cli({"lines", "--repo", f.repo.root().string(), "--pairs",
                      (out / "pairs.jsonl").string(), "--pair", "99"});
  EXPECT_EQ(missing.code, kExitFailure);
  auto pairs = load_pairs(out / "pairs.jsonl");
  EXPECT_THROW((void)find_pair(pairs, "zz:zz"), Error);
  EXPECT_THROW((void)find_pair(pairs, "x"), Error);
  EXPECT_EQ(&find_pair(pairs, "0"), &pairs[0]);
}

TEST(Cli, PairJsonRoundTrip) {
  InducingPair p;
  p.inducing_hash = "aaa";
  p.fix_hash = "bbb";
  p.ticket_id = "7";
  p.partial_fix = true;
  p.evidence = {{"x.py", 3, Side::old_side}};
  auto back = pair_from_json(pair_to_json(p));
  EXPECT_EQ(back.inducing_hash, p.inducing_hash);
  EXPECT_EQ(back.ticket_id, p.ticket_id);
  EXPECT_TRUE(back.partial_fix);
  ASSERT_EQ(back.evidence.size(), 1u);
  EXPECT_EQ(back.evidence[0].line_no, 3u);
  EXPECT_THROW((void)pair_from_json(nlohmann::json{{"fix", "b"}}), Error);
}

TEST(Cli, TrainEvalAblateNormalize) {
  test::TempDir dir;
  auto data = write_dataset(dir.path(), 60, 5);
  auto model = (dir.path() / "m.json").string();
  auto t = cli(with({"train", "--data", data.string(), "--model-out", model, "--json"}, kQuick));
  ASSERT_EQ(t.code, kExitOk) << t.err;
  auto report = nlohmann::json::parse(t.out);
  EXPECT_EQ(report["seed"], 42);
  EXPECT_EQ(report["test_rows"], 18);
  EXPECT_FALSE(report.contains("generated_at"));
  auto again =
      cli(with({"train", "--data", data.string(), "--model-out", model, "--json"}, kQuick));
  EXPECT_EQ(again.out, t.out);

  auto e = cli({"eval", "--model", model, "--data", data.string(), "--json"});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  auto confusion = nlohmann::json::parse(e.out)["confusion"];
  EXPECT_EQ(confusion["tp"].get<int>() + confusion["fp"].get<int>() +
                confusion["tn"].get<int>() + confusion["fn"].get<int>(),
            60);
  auto strict = cli({"eval", "--model", model, "--data", data.string(), "--json", "--threshold",
                     "1.01"});
  EXPECT_EQ(nlohmann::json::parse(strict.out)["confusion"]["tp"], 0);

  auto a = cli(with({"ablate", "--data", data.string(), "--features", "la,ld,nf", "--json"},
                    kQuick));
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(nlohmann::json::parse(a.out)["rows"].size(), 4u);

  auto norm_out = (dir.path() / "n.csv").string();
  auto n = cli({"normalize", "--data", data.string(), "--out", norm_out, "--columns", "la,ld",
                "--json"});
  ASSERT_EQ(n.code, kExitOk) << n.err;
  auto normalized = import_csv(norm_out);
  for (const auto &row : normalized.rows) {
    EXPECT_GE(row.la, 0);
    EXPECT_LE(row.la, 1);
  }
  EXPECT_TRUE(nlohmann::json::parse(n.out)["ranges"].contains("la"));
  EXPECT_EQ(cli({"normalize", "--data", data.string(), "--out", norm_out, "--columns", "bogus"})
                .code,
            kExitFailure);
}
