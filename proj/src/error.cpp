#include "projfree/error.hpp"

namespace projfree {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidExponent: return "invalid-exponent";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::NonFinite: return "non-finite";
    case ErrorKind::SizeLimit: return "size-limit";
    case ErrorKind::NumericFailure: return "numeric-failure";
    case ErrorKind::NotStronglyConvex: return "not-strongly-convex";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Config: return "config";
    }
    return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace projfree
