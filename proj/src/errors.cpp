#include "cgad/errors.hpp"

namespace cgad {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::DuplicateSensorName: return "DuplicateSensorName";
        case ErrorCode::SegmentTooShort: return "SegmentTooShort";
        case ErrorCode::LagTooLarge: return "LagTooLarge";
        case ErrorCode::MissingClass: return "MissingClass";
        case ErrorCode::DidNotConverge: return "DidNotConverge";
        case ErrorCode::CyclicAfterThreshold: return "CyclicAfterThreshold";
        case ErrorCode::NodeSetMismatch: return "NodeSetMismatch";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::DegenerateLabels: return "DegenerateLabels";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::MetricMismatch: return "MetricMismatch";
    }
    return "Unknown";
}

} // namespace cgad
