#pragma once

#include <Eigen/Dense>

#include "bispeech/audio_io.hpp"

namespace bispeech {

struct CepstralConfig {
    double frame_len_ms = 25.0;
    double hop_ms = 10.0;
    int n_mels = 26;
    int n_coeffs = 13;
    double fmin = 0.0;
    double fmax = 0.0;           // 0 means sample_rate / 2
    double pre_emphasis = 0.97;  // in [0, 1)
};

// frames x n_coeffs cepstral matrix; frame_times holds each frame's center
// time in seconds.
struct MfccMatrix {
    Eigen::MatrixXd coeffs;
    Eigen::VectorXd frame_times;
};

// n_mels x (fft_size/2 + 1) triangular filters.
struct MelFilterbank {
    Eigen::MatrixXd weights;
};

// mel = 2595 * log10(1 + f/700)
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters with peaks equally spaced on the mel axis between fmin
// and fmax; each triangle spans its two neighboring peak frequencies (band
// edges at fmin/fmax for the outermost filters).
MelFilterbank build_filterbank(const CepstralConfig& config, int fft_size, int sample_rate);

// frames x n_mels log filterbank energies: pre-emphasis, Hann window, FFT
// (next power of two >= frame length), power spectrum, filterbank product,
// log(x + 1e-10).
Eigen::MatrixXd mel_spectrogram(const AudioClip& clip, const CepstralConfig& config);

// Row-wise orthonormal DCT-II of the log mel energies, truncated to the
// first n_coeffs coefficients (coefficient 0 retained).
MfccMatrix mfcc(const AudioClip& clip, const CepstralConfig& config);

// First temporal difference: out[t] = in[t] - in[t-1], first row zero.
MfccMatrix delta(const MfccMatrix& matrix);

// Second temporal difference: delta applied twice.
MfccMatrix delta2(const MfccMatrix& matrix);

// Numeric text dump, one frame per line.
std::string dump_mfcc(const MfccMatrix& matrix);

}  // namespace bispeech
