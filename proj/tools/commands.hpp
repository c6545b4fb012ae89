#pragma once

#include <string>
#include <vector>

namespace fracint::cli {

// Exit codes: 0 success, 1 invariant-suite failure, 2 parameter or validation error.
int run(int argc, const char* const* argv);

}  // namespace fracint::cli
