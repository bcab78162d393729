#pragma once

#include <string>
#include <vector>

namespace emtherm {

// Batch front-end. Subcommands: mesh, simulate, analyze, calibrate,
// dump-materials. Returns the process exit code: 0 success, 1 config error,
// 2 numerical failure, 3 calibration did not converge (best-so-far written).
int run_cli(int argc, const char* const* argv);

// Same, for in-process callers; args exclude the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace emtherm
