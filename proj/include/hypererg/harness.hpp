#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypererg/config.hpp"

namespace hypererg {

const std::vector<std::string>& subcommands();

struct RunResult {
  int exit_code = 0;
  std::string message;
  std::vector<std::string> outputs;  // report files written, manifest last
};

// Runs one subcommand and writes its reports plus manifest.json into out_dir.
// Never throws: failures become exit codes 1 (assertion), 2 (input) or 3 (resource cap).
RunResult run(const std::string& subcommand, const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& out_dir);
RunResult run_config(const std::string& subcommand, const Config& config, std::optional<std::uint64_t> seed,
                     const std::string& out_dir);

// Shortest round-trip decimal form; "nan" and "inf" spelled out.
std::string format_number(double x);

}  // namespace hypererg
