#include "esg/error.hpp"

namespace esg {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::MissingPath: return "MissingPath";
        case ErrorKind::UnknownFactor: return "UnknownFactor";
        case ErrorKind::DuplicateDate: return "DuplicateDate";
        case ErrorKind::NonMonotoneDates: return "NonMonotoneDates";
        case ErrorKind::UnparseableCell: return "UnparseableCell";
        case ErrorKind::LeadingGap: return "LeadingGap";
        case ErrorKind::NonPositiveLevel: return "NonPositiveLevel";
        case ErrorKind::InsufficientHistory: return "InsufficientHistory";
        case ErrorKind::DegenerateFactor: return "DegenerateFactor";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::EmptySample: return "EmptySample";
        case ErrorKind::BatchTooSmall: return "BatchTooSmall";
        case ErrorKind::NonFiniteValue: return "NonFiniteValue";
        case ErrorKind::UntrainedModel: return "UntrainedModel";
        case ErrorKind::UndefinedCQV: return "UndefinedCQV";
        case ErrorKind::TrainingDiverged: return "TrainingDiverged";
        case ErrorKind::DegenerateYield: return "DegenerateYield";
        case ErrorKind::UnknownRating: return "UnknownRating";
        case ErrorKind::InvalidSpread: return "InvalidSpread";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::CurveRange: return "CurveRange";
        case ErrorKind::ZeroBaseValue: return "ZeroBaseValue";
        case ErrorKind::UnknownInstrument: return "UnknownInstrument";
        case ErrorKind::UnresolvedFactor: return "UnresolvedFactor";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidConfig:
        case ErrorKind::MissingPath:
            return 1;
        case ErrorKind::TrainingDiverged:
            return 3;
        case ErrorKind::DegenerateYield:
        case ErrorKind::UnknownRating:
        case ErrorKind::InvalidSpread:
        case ErrorKind::SingularSystem:
        case ErrorKind::CurveRange:
        case ErrorKind::ZeroBaseValue:
        case ErrorKind::UnknownInstrument:
        case ErrorKind::UnresolvedFactor:
            return 4;
        default:
            return 2;
    }
}

}  // namespace esg
