#pragma once

#include <stdexcept>
#include <string>

namespace lrex {

/// Failure categories shared by all modules. The CLI maps each to an exit code.
enum class ErrorCode {
    BadAlpha,
    BadWeights,
    BadVariant,
    NonIrreducible,
    TruncationTooSmall,
    TailNotConverged,
    BadSize,
    BadDensity,
    BadInterval,
    NoParticle,
    StateSpaceTooLarge,
    SingularSolve,
    NotSymmetric,
    QuadratureFail,
    InnerGridTooCoarse,
    BoundViolated,
    InsufficientPoints,
    NonPositiveData,
    IllConditioned,
    GridMismatch,
    TooFewReplicas,
    ParseError,
    ValidationError,
    IoError,
};

const char* to_string(ErrorCode c) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace lrex
