#pragma once

#include <stdexcept>
#include <string>

namespace projfree {

enum class ErrorKind {
    InvalidArgument,
    InvalidExponent,
    ShapeMismatch,
    NonFinite,
    SizeLimit,
    NumericFailure,
    NotStronglyConvex,
    Unsupported,
    Divergence,
    Parse,
    Config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` lets callers (the CLI in
/// particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace projfree
