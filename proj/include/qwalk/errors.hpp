#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

// Exit-code convention shared with the CLI:
//   0 ok, 2 config error, 3 numerical failure, 4 contract violation.
struct Error : std::runtime_error {
    int exit_code;
    Error(std::string msg, int code) : std::runtime_error(std::move(msg)), exit_code(code) {}
};

// Bad inputs / violated preconditions (invalid-dimension, dimension mismatch,
// singular-point, ambiguous-branch, degenerate-field, ...).
struct ContractError : Error {
    explicit ContractError(std::string msg) : Error(std::move(msg), 4) {}
};

// Eigensolver or quadrature breakdown.
struct NumericalError : Error {
    explicit NumericalError(std::string msg) : Error(std::move(msg), 3) {}
};

// Malformed configuration or data files.
struct ConfigError : Error {
    explicit ConfigError(std::string msg) : Error(std::move(msg), 2) {}
};

}  // namespace qwalk
