#pragma once

#include <string>
#include <vector>

#include "fieldlab/config.hpp"

namespace fieldlab {

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> summary;    // one line per test
  std::vector<std::string> csv_files;  // paths written
};

// Known subcommand names, in dispatch order.
const std::vector<std::string>& subcommand_names();

// Executes one subcommand against a validated config. Seed-deterministic:
// identical configs produce byte-identical CSV output for any worker count.
RunResult run_subcommand(const std::string& name, const ExperimentConfig& cfg);

}  // namespace fieldlab
