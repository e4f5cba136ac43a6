#pragma once

#include <iosfwd>

namespace daeref {

/// Command-line entry point. Exit codes: 0 success, 1 domain error (error JSON
/// on `err`), 2 usage error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace daeref
