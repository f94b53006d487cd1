#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavegraph {

enum class ErrorKind {
    domain_mismatch,
    unknown_vertex,
    invalid_argument,
    parse_error,
    undefined_jump,
    empty_scan,
    insufficient_data,
    truncation_too_small,
    nonpositive_potential,
    stability,
    support_violation,
    truncated_support,
    metric_invalid,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::domain_mismatch: return "domain_mismatch";
    case ErrorKind::unknown_vertex: return "unknown_vertex";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::parse_error: return "parse_error";
    case ErrorKind::undefined_jump: return "undefined_jump";
    case ErrorKind::empty_scan: return "empty_scan";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::truncation_too_small: return "truncation_too_small";
    case ErrorKind::nonpositive_potential: return "nonpositive_potential";
    case ErrorKind::stability: return "stability";
    case ErrorKind::support_violation: return "support_violation";
    case ErrorKind::truncated_support: return "truncated_support";
    case ErrorKind::metric_invalid: return "metric_invalid";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

} // namespace wavegraph
