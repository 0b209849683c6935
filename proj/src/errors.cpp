#include "droc/errors.hpp"

namespace droc {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NumericalBlowup: return "NumericalBlowup";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::InvalidDensity: return "InvalidDensity";
        case ErrorCode::MassMismatch: return "MassMismatch";
        case ErrorCode::MissingSensitivities: return "MissingSensitivities";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::InternalError: return "InternalError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Config: return "ConfigError";
        case ErrorCode::Io: return "IoError";
    }
    return "Unknown";
}

}  // namespace droc
