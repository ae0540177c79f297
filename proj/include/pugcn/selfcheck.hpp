#pragma once

#include <ostream>

namespace pugcn {

// Fast oracle/gradient property suite; prints one line per check and returns
// the number of failures.
int run_selfcheck(std::ostream& out);

}  // namespace pugcn
