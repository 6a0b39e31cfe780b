#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace esg {

enum class ErrorKind {
    // configuration
    InvalidConfig,
    MissingPath,
    // data
    UnknownFactor,
    DuplicateDate,
    NonMonotoneDates,
    UnparseableCell,
    LeadingGap,
    NonPositiveLevel,
    InsufficientHistory,
    DegenerateFactor,
    DimensionMismatch,
    EmptySample,
    BatchTooSmall,
    NonFiniteValue,
    UntrainedModel,
    UndefinedCQV,
    // training
    TrainingDiverged,
    // valuation
    DegenerateYield,
    UnknownRating,
    InvalidSpread,
    SingularSystem,
    CurveRange,
    ZeroBaseValue,
    UnknownInstrument,
    UnresolvedFactor,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Process exit code for an error category: 1 config, 2 data, 3 divergence, 4 valuation.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) fail(kind, what);
}

}  // namespace esg
