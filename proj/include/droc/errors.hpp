#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace droc {

enum class ErrorCode {
    NumericalBlowup,
    DivisionByZero,
    OutOfDomain,
    DimensionMismatch,
    TooFewPoints,
    InvalidDensity,
    MassMismatch,
    MissingSensitivities,
    Infeasible,
    InternalError,
    InvalidArgument,
    Config,
    Io,
};

std::string_view to_string(ErrorCode code);

// Library-wide exception; the code identifies the failure class so callers
// (notably the CLI exit-code contract) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace droc
