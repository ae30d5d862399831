#pragma once

#include <stdexcept>
#include <string>

namespace padmm {

enum class ErrorCode {
    invalid_argument = 1,
    precondition = 2,
    domain = 3,
    budget = 4,
    parse = 5,
    precision = 6,
    // Raised when a computed instance contradicts a statement the library
    // certifies (e.g. a descent chain that fails to close). Never recoverable.
    internal_assertion = 7,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

}  // namespace padmm
