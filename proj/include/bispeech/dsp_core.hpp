#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bispeech {

// Forward DFT output of one frame. Unnormalized convention: bin[k] is the
// bare sum over the frame, the inverse (unused here) would carry 1/N.
struct ComplexSpectrum {
    Eigen::VectorXcd bins;
    int fft_size = 0;
};

enum class WindowKind { Rectangular, Hann };

// Window weights of the given length. Hann weight at index n of length L is
// 0.5*(1 - cos(2*pi*n/(L-1))); a length-1 window is the single weight 1.
Eigen::VectorXd make_window(WindowKind kind, int length);

// Radix-2 iterative FFT, zero-padding the frame up to fft_size.
// bin[k] = sum_n frame[n] * exp(-i*2*pi*k*n/fft_size).
ComplexSpectrum fft(const Eigen::VectorXd& frame, int fft_size);

// |bin[k]|^2 for every bin.
Eigen::VectorXd power_spectrum(const ComplexSpectrum& spectrum);

// Complete frames only: frame i covers samples [i*hop, i*hop + frame_len).
std::vector<Eigen::VectorXd> frame_signal(const Eigen::VectorXd& samples, int frame_len, int hop);

// Orthonormal DCT-II: out[k] = s(k) * sum_n in[n] * cos(pi*k*(2n+1)/(2N)),
// s(0) = sqrt(1/N), s(k>0) = sqrt(2/N). Energy preserving.
Eigen::VectorXd dct_ii(const Eigen::VectorXd& values);

bool is_power_of_two(int n);

}  // namespace bispeech
