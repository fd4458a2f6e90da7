#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lpqr {

/// Exit codes: 0 success (including non-converged fits), 2 usage error, 3 data
/// or solver error. Errors are reported on `err` as one line
/// "error: <Category>: <message>".
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace lpqr
