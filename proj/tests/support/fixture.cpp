#include "fixture.hpp"

#include "jitminer/process.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace jitminer::test {

std::filesystem::path data_dir() { return JITMINER_TEST_DATA; }

std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

std::string substitute(std::string text, const std::map<std::string, std::string> &values) {
  for (const auto &[key, value] : values) {
    const std::string token = "{" + key + "}";
    for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos)) {
      text.replace(pos, token.size(), value);
      pos += value.size();
    }
  }
  return text;
}

TempDir::TempDir() {
  std::random_device rd;
  auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = base / ("jitminer-test-" + std::to_string(rd()));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

FixtureRepo::FixtureRepo() {
  git({"init", "-q", "-b", "main"});
}

std::string FixtureRepo::git(const std::vector<std::string> &args) {
  std::vector<std::string> argv{"git", "-C", root().string()};
  argv.insert(argv.end(), args.begin(), args.end());
  ProcessOptions options;
  options.env_set = {{"GIT_CONFIG_NOSYSTEM", "1"},
                     {"GIT_CONFIG_GLOBAL", "/dev/null"},
                     {"GIT_AUTHOR_NAME", "Fixture"},
                     {"GIT_AUTHOR_EMAIL", "fixture@example.com"},
                     {"GIT_COMMITTER_NAME", "Fixture"},
                     {"GIT_COMMITTER_EMAIL", "fixture@example.com"},
                     {"LC_ALL", "C"}};
  options.env_unset = {"GIT_DIR", "GIT_WORK_TREE", "GIT_INDEX_FILE"};
  auto result = run_process(argv, options);
  if (result.exit_code != 0) {
    throw std::runtime_error("git failed: " + result.err);
  }
  return result.out;
}

void FixtureRepo::write(const std::string &rel, const std::string &content) {
  write_text_file(root() / rel, content);
}

void FixtureRepo::remove(const std::string &rel) { git({"rm", "-q", rel}); }

void FixtureRepo::move(const std::string &from, const std::string &to) {
  git({"mv", from, to});
}

std::string FixtureRepo::commit(const std::string &message, const Author &author, Timestamp when) {
  git({"add", "-A"});
  std::vector<std::string> argv{"git", "-C", root().string(), "commit", "-q", "--allow-empty",
                                "-m", message};
  ProcessOptions options;
  const std::string date = "@" + std::to_string(when) + " +0000";
  options.env_set = {{"GIT_CONFIG_NOSYSTEM", "1"},     {"GIT_CONFIG_GLOBAL", "/dev/null"},
                     {"GIT_AUTHOR_NAME", author.name}, {"GIT_AUTHOR_EMAIL", author.email},
                     {"GIT_AUTHOR_DATE", date},        {"GIT_COMMITTER_NAME", author.name},
                     {"GIT_COMMITTER_EMAIL", author.email}, {"GIT_COMMITTER_DATE", date},
                     {"LC_ALL", "C"}};
  options.env_unset = {"GIT_DIR", "GIT_WORK_TREE", "GIT_INDEX_FILE"};
  auto result = run_process(argv, options);
  if (result.exit_code != 0) {
    throw std::runtime_error("git commit failed: " + result.err);
  }
  auto head = git({"rev-parse", "HEAD"});
  return head.substr(0, head.find('\n'));
}

void build_szz_fixture(SzzFixture &f) {
  auto &r = f.repo;
  auto at = [](int days) { return kBase + days * kDay; };

  r.write("src/core.py", "c1\nc2\nc3\nc4\nc5\nc6\n");
  r.write("src/util.py", "u1\nu2\nu3\nu4\n");
  r.write("web/view.html", "<html>\n<p>hello</p>\n</html>\n");
  f.hash["C1"] = r.commit("Initial import", kAlice, at(1));

  r.write("src/core.py", "c1\nc2\nretry = 0  # BUG-A\nc4\nc5\nc6\n");
  f.hash["C2"] = r.commit("Add retry logic", kBob, at(2));

  r.write("docs/readme.txt", "readme\n");
  f.hash["C3"] = r.commit("Add readme", kCarol, at(3));

  r.write("src/db.py", "d1\nd2\nconn.close  # BUG-C\nd4\nd5\n");
  f.hash["C4"] = r.commit("Add database layer", kAlice, at(4));

  // tickets 1-3 are reported on day 5
  r.write("web/view.html", "<html>\n<p>hello</p>  <!-- HERRING -->\n</html>\n");
  f.hash["C5"] = r.commit("Tweak view markup", kBob, at(6));

  r.write("docs/readme.txt", "readme\nmore words\n");
  f.hash["C6"] = r.commit("Update readme", kCarol, at(7));

  r.write("src/core.py", "c1\nc2\nretry = 3\nc4\nc5\nc6\n");
  f.hash["C7"] = r.commit("Fixes #1 retry counter", kAlice, at(8));

  r.write("src/util.py", "u1\nu2\nif not data: return  # BUG-B\nu3\nu4\n");
  f.hash["C8"] = r.commit("Guard util input, see #2 (partial fix)", kBob, at(9));

  r.write("src/db.py", "d1\nd2\nd4\nd5\n");
  r.write("web/view.html", "<html>\n</html>\n");
  f.hash["C9"] = r.commit("Fix #3 connection leak", kCarol, at(10));

  r.write("src/util.py", "u1\nu2\nu3\nu4\n");
  f.hash["C10"] = r.commit("Fixes #2 properly", kAlice, at(11));

  r.write("src/flags.py", "FLAG = True\n");
  f.hash["C11"] = r.commit("Add feature flag", kBob, at(12));

  r.write("src/core.py", "c1 v2\nc2\nretry = 3\nc4\nc5\nc6\n");
  f.hash["C12"] = r.commit("Bump version", kCarol, at(13));

  f.tickets_csv = "id,type,status,time,changetime,summary\n"
                  "1,defect,closed,2020-01-06T00:00:00Z,2020-01-20T00:00:00Z,Retry counter wrong\n"
                  "2,defect,closed,2020-01-06T00:00:00Z,2020-01-20T00:00:00Z,Util crashes on input\n"
                  "3,defect,closed,2020-01-06T00:00:00Z,2020-01-20T00:00:00Z,Connection leak\n";
  f.tickets_path = f.work.path() / "tickets.csv";
  write_text_file(f.tickets_path, f.tickets_csv);

  f.planted = {
      {f.hash["C2"], f.hash["C7"], "1", false, {"src/core.py", 3, Side::new_side}},
      {f.hash["C4"], f.hash["C9"], "3", false, {"src/db.py", 3, Side::new_side}},
      {f.hash["C8"], f.hash["C10"], "2", true, {"src/util.py", 3, Side::new_side}},
  };
  f.red_herring = f.hash["C5"];
}

void build_golden_fixture(GoldenFixture &f) {
  auto &r = f.repo;
  r.write("a/x.py", "x1\nx2\nx3\nx4\n");
  r.write("README", "readme\nsecond\n");
  f.hash["G1"] = r.commit("Initial commit", kAlice, kBase);

  r.write("a/x.py", "x1\np1\np2\nx3\nx4\n");
  r.write("b/y.py", "y1\ny2\ny3\n");
  f.hash["G2"] = r.commit("Add parser", kBob, kBase + kDay);

  r.write("a/x.py", "x1\np1\np2 fixed\nx3\nx4\n");
  f.hash["G3"] = r.commit("Fix #1 parser crash", kAlice, kBase + 3 * kDay);

  f.tickets_path = f.work.path() / "tickets.csv";
  write_text_file(f.tickets_path,
                  "id,type,status,time,changetime,summary\n"
                  "1,defect,closed,2020-01-03T00:00:00Z,2020-01-05T00:00:00Z,Parser crash\n");
}

} // namespace jitminer::test
