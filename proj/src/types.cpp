#include "apm/types.hpp"

namespace apm {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::NotCritical: return "NotCritical";
    case ErrorCode::NotFixedPoint: return "NotFixedPoint";
    case ErrorCode::NormalFormViolated: return "NormalFormViolated";
    case ErrorCode::VanishingField: return "VanishingField";
    case ErrorCode::Aliased: return "Aliased";
    case ErrorCode::FixedPointOnCurve: return "FixedPointOnCurve";
    case ErrorCode::NotIsolated: return "NotIsolated";
    case ErrorCode::OrbitEscaped: return "OrbitEscaped";
    case ErrorCode::PunctureHit: return "PunctureHit";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::InvariantBreach: return "InvariantBreach";
    }
    return "Unknown";
}

} // namespace apm
