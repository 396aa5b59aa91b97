#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dvn {

// Fixed default seed for all commands; never wall-clock.
inline constexpr std::uint64_t kDefaultSeed = 123456789;

// Runs one CLI invocation. argv excludes the program name.
// Exit codes: 0 success, 1 usage, 2 I/O, 3 numerical/fit failure.
int cli_run(const std::vector<std::string>& argv);

}  // namespace dvn
