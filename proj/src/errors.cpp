#include "shiftcast/errors.hpp"

namespace shiftcast {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::RaggedRows: return "RaggedRows";
        case ErrorCode::NonNumericCell: return "NonNumericCell";
        case ErrorCode::EmptyFile: return "EmptyFile";
        case ErrorCode::SliceTooShort: return "SliceTooShort";
        case ErrorCode::DegenerateVariable: return "DegenerateVariable";
        case ErrorCode::SeriesTooShort: return "SeriesTooShort";
        case ErrorCode::SingularRegression: return "SingularRegression";
        case ErrorCode::UnstableRegime: return "UnstableRegime";
        case ErrorCode::InvalidScenario: return "InvalidScenario";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::NegativeVariance: return "NegativeVariance";
        case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
        case ErrorCode::InvalidWindow: return "InvalidWindow";
        case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::DivergedLoss: return "DivergedLoss";
        case ErrorCode::UnknownAblation: return "UnknownAblation";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

}  // namespace shiftcast
