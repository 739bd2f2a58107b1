#pragma once

#include "jitminer/szz.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace jitminer {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name. Normal output goes to `out`, diagnostics
// to `err`; logging goes to stderr.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
int run_cli(int argc, char **argv);

nlohmann::json pair_to_json(const InducingPair &pair);
InducingPair pair_from_json(const nlohmann::json &j);
std::vector<InducingPair> load_pairs(const std::filesystem::path &path);

// `spec` is a 0-based index into `pairs` or "inducing:fix" with full or
// abbreviated (unique prefix) hashes. Error(UnknownPair) otherwise.
const InducingPair &find_pair(const std::vector<InducingPair> &pairs, std::string_view spec);

} // namespace jitminer
