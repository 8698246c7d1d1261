#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace torsflow {

enum class ErrorCode {
    InvalidInput,
    NotAComplex,
    BasisMismatch,
    NotExact,
    InvalidFiltration,
    InvalidModel,
    ModelOrderError,
    AssumptionViolated,
    IllegalConnection,
    FastPathUnavailable,
    InvalidCW,
    UnknownGenerator,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// front ends can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace torsflow
