#include "bispeech/dsp_core.hpp"

#include <cmath>
#include <complex>

#include "bispeech/error.hpp"

namespace bispeech {

bool is_power_of_two(int n) {
    return n > 0 && (n & (n - 1)) == 0;
}

Eigen::VectorXd make_window(WindowKind kind, int length) {
    if (length < 1) fail(ErrorCode::EmptyInput, "window length must be positive");
    Eigen::VectorXd w(length);
    switch (kind) {
        case WindowKind::Rectangular:
            w.setOnes();
            break;
        case WindowKind::Hann:
            if (length == 1) {
                w(0) = 1.0;
            } else {
                for (int n = 0; n < length; ++n) {
                    w(n) = 0.5 * (1.0 - std::cos(2.0 * M_PI * n / (length - 1)));
                }
            }
            break;
    }
    return w;
}

ComplexSpectrum fft(const Eigen::VectorXd& frame, int fft_size) {
    if (!is_power_of_two(fft_size)) {
        fail(ErrorCode::NotPowerOfTwo, "fft size " + std::to_string(fft_size));
    }
    if (frame.size() > fft_size) {
        fail(ErrorCode::FrameTooLong,
             "frame of " + std::to_string(frame.size()) + " samples exceeds fft size " +
                 std::to_string(fft_size));
    }

    Eigen::VectorXcd bins = Eigen::VectorXcd::Zero(fft_size);
    for (Eigen::Index n = 0; n < frame.size(); ++n) bins(n) = frame(n);

    // Bit-reversal permutation.
    for (int i = 1, j = 0; i < fft_size; ++i) {
        int bit = fft_size >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(bins(i), bins(j));
    }

    for (int len = 2; len <= fft_size; len <<= 1) {
        const double angle = -2.0 * M_PI / len;
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (int i = 0; i < fft_size; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (int k = 0; k < len / 2; ++k) {
                const std::complex<double> u = bins(i + k);
                const std::complex<double> v = bins(i + k + len / 2) * w;
                bins(i + k) = u + v;
                bins(i + k + len / 2) = u - v;
                w *= wlen;
            }
        }
    }

    return ComplexSpectrum{std::move(bins), fft_size};
}

Eigen::VectorXd power_spectrum(const ComplexSpectrum& spectrum) {
    return spectrum.bins.array().abs2();
}

std::vector<Eigen::VectorXd> frame_signal(const Eigen::VectorXd& samples, int frame_len, int hop) {
    if (frame_len < 1 || hop < 1) {
        fail(ErrorCode::InvalidArgument, "frame_len and hop must be positive");
    }
    std::vector<Eigen::VectorXd> frames;
    if (samples.size() < frame_len) return frames;
    const Eigen::Index count = (samples.size() - frame_len) / hop + 1;
    frames.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) {
        frames.push_back(samples.segment(i * hop, frame_len));
    }
    return frames;
}

Eigen::VectorXd dct_ii(const Eigen::VectorXd& values) {
    const Eigen::Index n = values.size();
    if (n == 0) fail(ErrorCode::EmptyInput, "dct_ii of empty input");
    const double s0 = std::sqrt(1.0 / static_cast<double>(n));
    const double sk = std::sqrt(2.0 / static_cast<double>(n));
    Eigen::VectorXd out(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            acc += values(i) * std::cos(M_PI * k * (2 * i + 1) / (2.0 * n));
        }
        out(k) = (k == 0 ? s0 : sk) * acc;
    }
    return out;
}

}  // namespace bispeech
