#pragma once

#include <iosfwd>

namespace qmalab {

/// Runs the built-in example checks for every module (closed forms, oracles,
/// round trips), printing one line per check. Returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace qmalab
