#pragma once

#include <string>
#include <vector>

namespace graphrl {

/// Entry point behind the `graphrl` binary. Exit codes: 0 success, 1 config
/// or input validation failure, 2 runtime failure.
int run_cli(const std::vector<std::string>& args);

} // namespace graphrl
