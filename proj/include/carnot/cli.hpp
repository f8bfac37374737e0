#ifndef CARNOT_CLI_HPP
#define CARNOT_CLI_HPP

#include <iosfwd>

namespace carnot {

/// The command-line front end: analyze, connection, flat and geodesic on a
/// manifold file.  Reports go to out, diagnostics to err.  Returns the exit
/// code: 0 on success (flat: flat), 1 for a non-flat verdict, 2 on errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace carnot

#endif
