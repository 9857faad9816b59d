#pragma once

#include <stdexcept>
#include <string>

namespace tarpath {

enum class ErrorKind {
    InvalidInput,
    InvalidInstance,
    Generator,
    Rollout,
    Divergence,
    Unsupported,
};

/// Domain error raised by every module. The CLI maps all of these to exit code 1.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace tarpath
