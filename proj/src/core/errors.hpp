#pragma once

#include <stdexcept>
#include <string>

namespace epochdd {

// Error kinds surfaced across the library and mapped one-to-one onto the
// C API status codes.
enum class ErrorKind {
    DegenerateMode,
    ConditionViolation,
    OutOfBranch,
    InactiveMode,
    TargetBehind,
    Regime,
    UnstableStep,
    Dimension,
    Diverged,
    RankViolation,
    Covariance,
    Init,
    TooFewSamples,
    Parameter,
    Config,
    Io,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DegenerateMode: return "DegenerateMode";
        case ErrorKind::ConditionViolation: return "ConditionViolation";
        case ErrorKind::OutOfBranch: return "OutOfBranch";
        case ErrorKind::InactiveMode: return "InactiveMode";
        case ErrorKind::TargetBehind: return "TargetBehind";
        case ErrorKind::Regime: return "RegimeError";
        case ErrorKind::UnstableStep: return "UnstableStep";
        case ErrorKind::Dimension: return "DimensionError";
        case ErrorKind::Diverged: return "Diverged";
        case ErrorKind::RankViolation: return "RankViolation";
        case ErrorKind::Covariance: return "CovarianceError";
        case ErrorKind::Init: return "InitError";
        case ErrorKind::TooFewSamples: return "TooFewSamples";
        case ErrorKind::Parameter: return "ParameterError";
        case ErrorKind::Config: return "ConfigError";
        case ErrorKind::Io: return "IoError";
    }
    return "UnknownError";
}

}  // namespace epochdd
