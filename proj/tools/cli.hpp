#pragma once

#include <iosfwd>

namespace pupil::cli {

/// Exit codes: detect returns 0 for a pupil and 1 for no pupil; every command
/// returns 2 on error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace pupil::cli
