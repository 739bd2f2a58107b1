#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace jitminer {

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

struct ProcessOptions {
  std::filesystem::path cwd;                                // empty: inherit
  std::string input;                                        // written to stdin, then closed
  std::vector<std::pair<std::string, std::string>> env_set; // added/overridden
  std::vector<std::string> env_unset;
};

// Runs argv[0] (PATH lookup) to completion, capturing stdout and stderr.
// Throws Error(IoError) only when the process cannot be started.
ProcessResult run_process(const std::vector<std::string> &argv, const ProcessOptions &options = {});

} // namespace jitminer
