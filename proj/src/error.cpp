#include "bispeech/error.hpp"

namespace bispeech {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedContainer: return "MalformedContainer";
        case ErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
        case ErrorCode::EmptyAudio: return "EmptyAudio";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NotPowerOfTwo: return "NotPowerOfTwo";
        case ErrorCode::FrameTooLong: return "FrameTooLong";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::ClipTooShort: return "ClipTooShort";
        case ErrorCode::TooFewSegments: return "TooFewSegments";
        case ErrorCode::DegenerateSignal: return "DegenerateSignal";
        case ErrorCode::DegenerateBand: return "DegenerateBand";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::DuplicatePath: return "DuplicatePath";
        case ErrorCode::EmptyManifest: return "EmptyManifest";
        case ErrorCode::ClassTooSmall: return "ClassTooSmall";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::SingularCovariance: return "SingularCovariance";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::UnreadableModel: return "UnreadableModel";
        case ErrorCode::UnknownClass: return "UnknownClass";
        case ErrorCode::SingleClassLabels: return "SingleClassLabels";
        case ErrorCode::EmptyMatrix: return "EmptyMatrix";
        case ErrorCode::InvalidValueRange: return "InvalidValueRange";
        case ErrorCode::NyquistViolation: return "NyquistViolation";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoFailure: return "IoFailure";
    }
    return "UnknownError";
}

bool is_io_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedContainer:
        case ErrorCode::UnsupportedEncoding:
        case ErrorCode::UnreadableModel:
        case ErrorCode::IoFailure:
            return true;
        default:
            return false;
    }
}

}  // namespace bispeech
