#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reebkit {

enum class ErrorCode {
    InvalidArgument,
    Parse,
    Precision,
    HalfIntegerAmbiguity,
    DegenerateIterate,
    EmptyWindow,
    ParamTooTight,
    NonpositiveMeanIndex,
    RationalRatio,
    NonResonanceFailed,
    HypothesisViolation,
    EventMismatch,
    ClassificationUndefined,
    NotApplicable,
    Undefined,
    BoundaryNotSquareZero,
    FiltrationViolation,
    ZetaMismatch,
    Overflow,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace reebkit
