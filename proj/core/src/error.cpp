#include "torsflow/error.hpp"

namespace torsflow {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::NotAComplex: return "NotAComplex";
        case ErrorCode::BasisMismatch: return "BasisMismatch";
        case ErrorCode::NotExact: return "NotExact";
        case ErrorCode::InvalidFiltration: return "InvalidFiltration";
        case ErrorCode::InvalidModel: return "InvalidModel";
        case ErrorCode::ModelOrderError: return "ModelOrderError";
        case ErrorCode::AssumptionViolated: return "AssumptionViolated";
        case ErrorCode::IllegalConnection: return "IllegalConnection";
        case ErrorCode::FastPathUnavailable: return "FastPathUnavailable";
        case ErrorCode::InvalidCW: return "InvalidCW";
        case ErrorCode::UnknownGenerator: return "UnknownGenerator";
    }
    return "Unknown";
}

}  // namespace torsflow
