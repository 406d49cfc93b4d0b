#pragma once

#include <iosfwd>

#include "hjbmc/cli/run_config.hpp"

namespace hjbmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Runs every (moneyness, N, M) combination of the sweep and writes the
/// report files into config.output_dir. Returns the process exit status;
/// failures are reported on `log` with the failing stage.
int run(const RunConfig& config, std::ostream& log);

/// Full command line entry point (flag parsing included).
int main_with_args(int argc, char** argv);

}  // namespace hjbmc::cli
