#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace margulis {

// Runs one command-line invocation (arguments without the program name).
// Returns 0 on success, 2 on bad input, 3 on numerical failure.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err);

}  // namespace margulis
