#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xol {

// Failure categories surfaced by the library. The CLI maps these onto exit
// codes, so keep names stable: they appear verbatim in JSON error objects.
enum class ErrorCode {
    InvalidArgument,
    DomainError,
    NonfiniteMoment,
    DegenerateVariance,
    AllZero,
    NonpositivePhi,
    NumericalFailure,
    ConditionViolated,
    AtomConditionViolated,
    ConditionNotMet,
    NoRootFound,
    NoInteriorMinimum,
    GridBoundaryMinimum,
    NotBracketed,
    ParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Thrown by the loss-file reader; carries the 1-based offending line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorCode::ParseError, what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

} // namespace xol
