#include "fracheat/error.hpp"

namespace fracheat {

const char *error_kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::IntegralExponent: return "IntegralExponent";
    case ErrorKind::ForbiddenIntegerOrder: return "ForbiddenIntegerOrder";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::SupportLeakage: return "SupportLeakage";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::IntegralOrder: return "IntegralOrder";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::MissingTraces: return "MissingTraces";
    case ErrorKind::NonzeroTraces: return "NonzeroTraces";
    case ErrorKind::OriginOutsideGrid: return "OriginOutsideGrid";
    case ErrorKind::NonRealOutput: return "NonRealOutput";
    case ErrorKind::BoundaryContamination: return "BoundaryContamination";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::InsufficientDecayRange: return "InsufficientDecayRange";
    case ErrorKind::StepExceedsGrid: return "StepExceedsGrid";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::SplitViolation: return "SplitViolation";
    case ErrorKind::OriginSingularity: return "OriginSingularity";
    case ErrorKind::SingularDerivative: return "SingularDerivative";
    case ErrorKind::UnresolvableEpsilon: return "UnresolvableEpsilon";
    case ErrorKind::TraceMismatch: return "TraceMismatch";
    case ErrorKind::LiftUnavailable: return "LiftUnavailable";
    case ErrorKind::RegimeUnsupported: return "RegimeUnsupported";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::CompatibilityFailed: return "CompatibilityFailed";
    case ErrorKind::OriginMode: return "OriginMode";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

} // namespace fracheat
