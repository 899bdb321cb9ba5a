#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace migplan {

enum class ErrorCode {
    io_error,
    parse_error,
    validation_failed,
    tariff_missing,
    cost_missing,
    goal_unreachable,
    tree_too_large,
    instance_too_large,
    unevaluated,
    disagreement,
    invalid_argument,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::io_error: return "IO_ERROR";
        case ErrorCode::parse_error: return "PARSE_ERROR";
        case ErrorCode::validation_failed: return "VALIDATION_FAILED";
        case ErrorCode::tariff_missing: return "TARIFF_MISSING";
        case ErrorCode::cost_missing: return "COST_MISSING";
        case ErrorCode::goal_unreachable: return "GOAL_UNREACHABLE";
        case ErrorCode::tree_too_large: return "TREE_TOO_LARGE";
        case ErrorCode::instance_too_large: return "INSTANCE_TOO_LARGE";
        case ErrorCode::unevaluated: return "UNEVALUATED";
        case ErrorCode::disagreement: return "DISAGREEMENT";
        case ErrorCode::invalid_argument: return "INVALID_ARGUMENT";
    }
    return "UNKNOWN";
}

/// Process exit status for a failure class: 1 validation, 2 I/O,
/// 3 computational (unreachable goal, oversize), 4 disagreement.
inline int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::validation_failed:
        case ErrorCode::tariff_missing:
        case ErrorCode::cost_missing:
        case ErrorCode::invalid_argument:
            return 1;
        case ErrorCode::io_error:
        case ErrorCode::parse_error:
            return 2;
        case ErrorCode::goal_unreachable:
        case ErrorCode::tree_too_large:
        case ErrorCode::instance_too_large:
        case ErrorCode::unevaluated:
            return 3;
        case ErrorCode::disagreement:
            return 4;
    }
    return 3;
}

/// A single broken invariant. `code` is machine readable, `message` is for humans.
struct Violation {
    std::string code;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

class PlanError : public std::runtime_error {
public:
    PlanError(ErrorCode code, const std::string& message, std::vector<Violation> violations = {})
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code),
          message_(message),
          violations_(std::move(violations)) {}

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& message() const noexcept { return message_; }
    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    ErrorCode code_;
    std::string message_;
    std::vector<Violation> violations_;
};

}  // namespace migplan
