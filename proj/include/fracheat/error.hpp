#pragma once

#include <stdexcept>
#include <string>

namespace fracheat {

enum class ErrorKind {
    IntegralExponent,
    ForbiddenIntegerOrder,
    DimensionMismatch,
    IndexOutOfRange,
    ShapeMismatch,
    SupportLeakage,
    NonFinite,
    IntegralOrder,
    TooFewPoints,
    MissingTraces,
    NonzeroTraces,
    OriginOutsideGrid,
    NonRealOutput,
    BoundaryContamination,
    IllConditioned,
    InsufficientDecayRange,
    StepExceedsGrid,
    DegenerateFit,
    SplitViolation,
    OriginSingularity,
    SingularDerivative,
    UnresolvableEpsilon,
    TraceMismatch,
    LiftUnavailable,
    RegimeUnsupported,
    ValidationFailed,
    CompatibilityFailed,
    OriginMode,
    InvalidArgument,
};

const char *error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace fracheat
