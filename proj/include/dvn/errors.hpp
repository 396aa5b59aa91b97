#pragma once

#include <stdexcept>
#include <string>

namespace dvn {

// Thrown for file-format and filesystem problems (CLI exit code 2).
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown for numerical failures: non-convergence, degenerate frames,
// unstable filters (CLI exit code 3).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dvn
