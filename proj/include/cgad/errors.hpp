#pragma once

#include <stdexcept>
#include <string>

namespace cgad {

enum class ErrorCode {
    ShapeMismatch,
    NonFiniteValue,
    DuplicateSensorName,
    SegmentTooShort,
    LagTooLarge,
    MissingClass,
    DidNotConverge,
    CyclicAfterThreshold,
    NodeSetMismatch,
    LengthMismatch,
    DegenerateLabels,
    InvalidConfig,
    IoError,
    MetricMismatch,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace cgad
