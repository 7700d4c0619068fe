/// @file cli.hpp
/// @brief Command-line dispatch for whitham_lab and the built-in self test.
///
/// Exit codes: 0 success, 1 usage, 2 validation (including config syntax),
/// 3 blow-up detected, 4 internal error.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace whitham {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_validation = 2, exit_blowup = 3, exit_internal = 4 };

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, const char* const* argv);

struct SelftestResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Quick invariant suite: operator identities, coercivity, linear dispersion,
/// conservation, RK4 order and plumbing round trips. Takes a few seconds.
std::vector<SelftestResult> run_selftest();

}  // namespace whitham
