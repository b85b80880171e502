#pragma once

#include <stdexcept>
#include <string>

namespace varsel {

// Raised when caller-supplied arguments violate a documented precondition.
// The CLI maps this to exit code 2.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when a computation cannot complete (solver iteration cap, missing
// observation, I/O failure). The CLI maps this to exit code 1.
struct ComputeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

}  // namespace varsel
