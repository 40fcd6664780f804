#pragma once

#include <stdexcept>
#include <string>

namespace bispeech {

// Every failure the library can report. Codes are grouped so the CLI can
// map them onto exit codes (domain -> 1, io/format -> 2).
enum class ErrorCode {
    // audio_io
    MalformedContainer,
    UnsupportedEncoding,
    EmptyAudio,
    LengthMismatch,
    // dsp_core
    NotPowerOfTwo,
    FrameTooLong,
    EmptyInput,
    // bispectrum
    ClipTooShort,
    TooFewSegments,
    DegenerateSignal,
    // cepstral
    DegenerateBand,
    // dataset
    UnknownLabel,
    DuplicatePath,
    EmptyManifest,
    ClassTooSmall,
    TooFewSamples,
    // classify
    TooFewRows,
    SingleClass,
    SingularCovariance,
    DimensionMismatch,
    UnreadableModel,
    // eval
    UnknownClass,
    SingleClassLabels,
    // viz / general I/O
    EmptyMatrix,
    InvalidValueRange,
    NyquistViolation,
    InvalidArgument,
    IoFailure,
};

const char* error_code_name(ErrorCode code);

// True for failures caused by the outside world (unreadable files, bad
// containers) rather than by the data handed to an operation.
bool is_io_error(ErrorCode code);

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

}  // namespace bispeech
