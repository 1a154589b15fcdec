// errors.hpp - error type shared by every avalanche module

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace avalanche {

enum class ErrorKind {
    StepSizeUnderflow,
    Inconclusive,
    TooFewPeaks,
    EventBudgetExceeded,
    TruncationTooSmall,
    DegenerateSeries,
    AllDegenerate,
    NoInteriorPeak,
    ParseError,
    ValidationError,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
        case ErrorKind::Inconclusive: return "Inconclusive";
        case ErrorKind::TooFewPeaks: return "TooFewPeaks";
        case ErrorKind::EventBudgetExceeded: return "EventBudgetExceeded";
        case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
        case ErrorKind::DegenerateSeries: return "DegenerateSeries";
        case ErrorKind::AllDegenerate: return "AllDegenerate";
        case ErrorKind::NoInteriorPeak: return "NoInteriorPeak";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what) {
    if (!condition) fail(ErrorKind::ValidationError, what);
}

} // namespace avalanche
