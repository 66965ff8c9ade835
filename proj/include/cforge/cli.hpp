#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cforge {

// Runs one command. Returns 0 on success, 2 on usage and parameter errors and
// 1 on data errors; errors are reported on `err` as a single JSON line.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cforge
