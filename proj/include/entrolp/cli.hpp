#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entrolp {

enum ExitCode {
    exit_ok = 0,
    exit_parse = 2,
    exit_symmetry = 3,
    exit_solver = 4,
    exit_usage = 5,
};

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace entrolp
