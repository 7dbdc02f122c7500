#pragma once

#include <iosfwd>

namespace gradepred {

// Entry point of the gradepred command line. Returns 0 on success, 2 on
// usage or configuration errors and 1 on any other failure; errors go to
// `err` as a single `error: <code>: <message>` line.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace gradepred
