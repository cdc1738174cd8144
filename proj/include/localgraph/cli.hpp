#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace localgraph {

// Runs one CLI invocation (arguments exclude the program name). Returns 0 on
// success, 1 on usage errors and 2 on data or I/O errors.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace localgraph
