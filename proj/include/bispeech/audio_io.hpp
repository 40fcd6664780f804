#pragma once

#include <Eigen/Dense>
#include <string>

namespace bispeech {

// Decoded PCM audio. Samples are dimensionless amplitudes in [-1, 1]
// (integer PCM scaled by 1/2^(bits-1)); multi-channel data stays interleaved
// until to_mono.
struct AudioClip {
    Eigen::VectorXd samples;
    int sample_rate = 0;
    std::string source_path;
};

// A freshly decoded file: clip still interleaved, channel count alongside.
struct WavData {
    AudioClip clip;
    int channels = 1;
};

// Decodes a RIFF/WAVE container with PCM u8/i16/i24 or IEEE float-32 data.
WavData load_wav(const std::string& path);

// Collapses interleaved channels to their per-frame arithmetic mean.
AudioClip to_mono(const AudioClip& clip, int channel_count);

// Head-truncates to at most round(max_seconds * sample_rate) samples.
AudioClip trim(const AudioClip& clip, double max_seconds);

// Convenience: load, mix down, truncate.
AudioClip load_mono_wav(const std::string& path, double max_seconds);

// Writes 16-bit PCM, mono unless channels > 1 (samples then interleaved).
void write_wav(const std::string& path, const AudioClip& clip, int channels = 1);

}  // namespace bispeech
