#pragma once

namespace minklab::cli {

inline constexpr const char* kToolVersion = "minklab 0.1.0";

/// Exit codes: 0 success, 1 input error, 2 precondition failure,
/// 3 non-convergence, 4 indeterminate.
int run(int argc, const char* const* argv);

} // namespace minklab::cli
