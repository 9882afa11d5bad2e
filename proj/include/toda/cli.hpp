#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "toda/model.hpp"

namespace toda {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitValidation = 2, kExitRuntime = 3 };

struct RunConfig {
  std::uint64_t seed = 42;
  std::size_t samples = 1'000'000;
  double tolerance = 1e-9;
  std::size_t max_bounces = 10'000;
  double omega = 1.0;
  unsigned workers = 1;
  std::string output_dir = ".";
  bool json = false;
};

/// "preset:<name>" or a path to a model JSON file. Throws ParseError.
TodaModel load_model(const std::string& source);

/// Runs the tool; stdout/stderr go to `out` / `err`. Returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace toda
