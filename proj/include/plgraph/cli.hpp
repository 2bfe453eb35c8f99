#pragma once

namespace plgraph {

/// Full command-line surface. Returns the process exit code:
/// 0 success, 1 input error, 2 non-convergence, 3 geometry not certified,
/// 4 verified property violated.
int run_cli(int argc, const char* const* argv);

}  // namespace plgraph
