#pragma once

#include <stdexcept>
#include <string>

namespace netrecon {

// Failure categories surfaced by the command-line tool as exit codes:
// config_error -> 2, data_error -> 3, numeric_error -> 4. Precondition
// violations inside the library throw std::invalid_argument and are
// programming errors, not run outcomes.

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace netrecon
