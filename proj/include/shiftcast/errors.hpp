#pragma once

#include <stdexcept>
#include <string>

namespace shiftcast {

enum class ErrorCode {
    // data
    RaggedRows,
    NonNumericCell,
    EmptyFile,
    SliceTooShort,
    DegenerateVariable,
    SeriesTooShort,
    SingularRegression,
    // synth
    UnstableRegime,
    InvalidScenario,
    // nn / model
    ShapeMismatch,
    NonFiniteValue,
    NegativeVariance,
    NonFiniteGradient,
    InvalidWindow,
    AlphaOutOfRange,
    NonFiniteLoss,
    // train / cli
    EmptyDataset,
    DivergedLoss,
    UnknownAblation,
    InvalidArgument,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace shiftcast
