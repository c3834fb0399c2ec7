#pragma once

#include <stdexcept>
#include <string>

namespace claw {

enum class ErrorCode {
    NonFiniteValue,
    MixedCovariateKinds,
    EmptyDataset,
    EmptyInput,
    NonPositiveScale,
    DegenerateSample,
    ZeroWeightRow,
    LengthMismatch,
    InsufficientNulls,
    EmptyTrainingHalf,
    EmptyGroup,
    EmptyTraining,
    DimensionMismatch,
    NonPositiveWeight,
    UnknownSetting,
    IndexOutOfRange,
    EmptyCalibration,
    MissingColumn,
    ParseError,
    InvalidConfig,
    InternalError,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::MixedCovariateKinds: return "MixedCovariateKinds";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::NonPositiveScale: return "NonPositiveScale";
        case ErrorCode::DegenerateSample: return "DegenerateSample";
        case ErrorCode::ZeroWeightRow: return "ZeroWeightRow";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::InsufficientNulls: return "InsufficientNulls";
        case ErrorCode::EmptyTrainingHalf: return "EmptyTrainingHalf";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::EmptyTraining: return "EmptyTraining";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
        case ErrorCode::UnknownSetting: return "UnknownSetting";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::EmptyCalibration: return "EmptyCalibration";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InternalError: return "InternalError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

// Message is a literal so passing checks stay allocation-free; use raise()
// directly when the message needs formatting.
inline void require(bool condition, ErrorCode code, const char* message) {
    if (!condition) raise(code, message);
}

}  // namespace claw
