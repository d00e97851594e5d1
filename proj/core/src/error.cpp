#include "xol/error.hpp"

namespace xol {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonfiniteMoment: return "NonfiniteMoment";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::NonpositivePhi: return "NonpositivePhi";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::ConditionViolated: return "ConditionViolated";
    case ErrorCode::AtomConditionViolated: return "AtomConditionViolated";
    case ErrorCode::ConditionNotMet: return "ConditionNotMet";
    case ErrorCode::NoRootFound: return "NoRootFound";
    case ErrorCode::NoInteriorMinimum: return "NoInteriorMinimum";
    case ErrorCode::GridBoundaryMinimum: return "GridBoundaryMinimum";
    case ErrorCode::NotBracketed: return "NotBracketed";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace xol
