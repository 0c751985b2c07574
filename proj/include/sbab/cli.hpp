#pragma once

// Command-line front end. Exit codes: 0 ok, 2 parse, 3 precondition or
// route, 4 budget.

#include <iosfwd>
#include <string>
#include <vector>

namespace sbab {

inline constexpr const char* kSchema = "sb-abelian/1";

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbab
