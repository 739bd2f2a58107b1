#pragma once

#include "jitminer/szz.hpp"
#include "jitminer/tracker.hpp"
#include "jitminer/vcs.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace jitminer::test {

inline constexpr Timestamp kBase = 1577836800; // 2020-01-01T00:00:00Z
inline constexpr Timestamp kDay = 86400;

std::filesystem::path data_dir();
std::string read_text(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);
// Replaces every "{KEY}" with its value.
std::string substitute(std::string text, const std::map<std::string, std::string> &values);

class TempDir {
public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  [[nodiscard]] const std::filesystem::path &path() const { return path_; }

private:
  std::filesystem::path path_;
};

struct Author {
  std::string name;
  std::string email;
};

inline const Author kAlice{"Alice", "alice@example.com"};
inline const Author kBob{"Bob", "bob@example.com"};
inline const Author kCarol{"Carol", "carol@example.com"};

// Scratch git repository with scripted, fully dated commits.
class FixtureRepo {
public:
  FixtureRepo();
  [[nodiscard]] const std::filesystem::path &root() const { return dir_.path(); }

  void write(const std::string &rel, const std::string &content);
  void remove(const std::string &rel);
  void move(const std::string &from, const std::string &to);
  std::string commit(const std::string &message, const Author &author, Timestamp when);
  std::string git(const std::vector<std::string> &args);

private:
  TempDir dir_;
};

// Twelve commits, three tickets, three planted inducing/fix pairs (one a
// partial-fix chain) and one inducer dated after its ticket.
struct SzzFixture {
  FixtureRepo repo;
  TempDir work; // ticket export and outputs live outside the repository
  std::map<std::string, std::string> hash; // "C1" .. "C12"
  std::string tickets_csv;
  std::filesystem::path tickets_path;

  struct Planted {
    std::string inducing;
    std::string fix;
    std::string ticket;
    bool partial_fix;
    LineRef defect_line; // new side of the inducing commit
  };
  std::vector<Planted> planted;
  std::string red_herring; // C5
};

void build_szz_fixture(SzzFixture &f);

// Three commits whose feature rows are worked out by hand in
// tests/data/golden/dataset.csv.
struct GoldenFixture {
  FixtureRepo repo;
  TempDir work;
  std::map<std::string, std::string> hash; // "G1" .. "G3"
  std::filesystem::path tickets_path;
};

void build_golden_fixture(GoldenFixture &f);

} // namespace jitminer::test
