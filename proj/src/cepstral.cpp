#include "bispeech/cepstral.hpp"

#include <cmath>

#include "bispeech/bispectrum.hpp"
#include "bispeech/dsp_core.hpp"
#include "bispeech/error.hpp"

namespace bispeech {

namespace {

constexpr double kLogFloor = 1e-10;

struct FrameLayout {
    int frame_len;
    int hop;
    int fft_size;
    double fmax;
};

FrameLayout layout_for(const CepstralConfig& config, int sample_rate) {
    if (sample_rate <= 0) fail(ErrorCode::InvalidArgument, "sample rate must be positive");
    if (config.frame_len_ms <= 0.0 || config.hop_ms <= 0.0) {
        fail(ErrorCode::InvalidArgument, "frame and hop durations must be positive");
    }
    if (config.n_coeffs > config.n_mels) {
        fail(ErrorCode::InvalidArgument, "n_coeffs must not exceed n_mels");
    }
    if (config.pre_emphasis < 0.0 || config.pre_emphasis >= 1.0) {
        fail(ErrorCode::InvalidArgument, "pre_emphasis must lie in [0, 1)");
    }
    FrameLayout layout;
    layout.frame_len = static_cast<int>(std::llround(config.frame_len_ms / 1000.0 * sample_rate));
    layout.hop = static_cast<int>(std::llround(config.hop_ms / 1000.0 * sample_rate));
    if (layout.frame_len < 1 || layout.hop < 1) {
        fail(ErrorCode::InvalidArgument, "frame or hop shorter than one sample");
    }
    layout.fft_size = 1;
    while (layout.fft_size < layout.frame_len) layout.fft_size <<= 1;
    layout.fmax = config.fmax > 0.0 ? config.fmax : sample_rate / 2.0;
    if (!(config.fmin < layout.fmax) || layout.fmax > sample_rate / 2.0 + 1e-9) {
        fail(ErrorCode::InvalidArgument, "need fmin < fmax <= sample_rate/2");
    }
    return layout;
}

}  // namespace

double hz_to_mel(double hz) {
    return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double mel_to_hz(double mel) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank build_filterbank(const CepstralConfig& config, int fft_size, int sample_rate) {
    if (config.n_mels < 1) fail(ErrorCode::InvalidArgument, "n_mels must be positive");
    const double fmax = config.fmax > 0.0 ? config.fmax : sample_rate / 2.0;
    const int n_bins = fft_size / 2 + 1;

    // n_mels + 2 equally spaced mel points; filter m peaks at point m+1 and
    // spans points m..m+2.
    const double mel_lo = hz_to_mel(config.fmin);
    const double mel_hi = hz_to_mel(fmax);
    Eigen::VectorXd edges_hz(config.n_mels + 2);
    for (int i = 0; i < config.n_mels + 2; ++i) {
        const double mel = mel_lo + (mel_hi - mel_lo) * i / (config.n_mels + 1);
        edges_hz(i) = mel_to_hz(mel);
    }

    MelFilterbank bank;
    bank.weights = Eigen::MatrixXd::Zero(config.n_mels, n_bins);
    const double bin_hz = static_cast<double>(sample_rate) / fft_size;
    for (int m = 0; m < config.n_mels; ++m) {
        const double left = edges_hz(m);
        const double center = edges_hz(m + 1);
        const double right = edges_hz(m + 2);
        bool any = false;
        for (int k = 0; k < n_bins; ++k) {
            const double f = k * bin_hz;
            double w = 0.0;
            if (f >= left && f <= center && center > left) {
                w = (f - left) / (center - left);
            } else if (f > center && f <= right && right > center) {
                w = (right - f) / (right - center);
            }
            if (w > 0.0) {
                bank.weights(m, k) = w;
                any = true;
            }
        }
        if (!any) {
            fail(ErrorCode::DegenerateBand,
                 "filter " + std::to_string(m) + " has no support at this FFT resolution");
        }
    }
    return bank;
}

Eigen::MatrixXd mel_spectrogram(const AudioClip& clip, const CepstralConfig& config) {
    const FrameLayout layout = layout_for(config, clip.sample_rate);
    if (clip.samples.size() < layout.frame_len) {
        fail(ErrorCode::ClipTooShort, "clip shorter than one analysis frame");
    }

    // Pre-emphasis over the whole clip; first sample passes through.
    Eigen::VectorXd emphasized(clip.samples.size());
    emphasized(0) = clip.samples(0);
    for (Eigen::Index i = 1; i < clip.samples.size(); ++i) {
        emphasized(i) = clip.samples(i) - config.pre_emphasis * clip.samples(i - 1);
    }

    const std::vector<Eigen::VectorXd> frames = frame_signal(emphasized, layout.frame_len, layout.hop);
    const Eigen::VectorXd window = make_window(WindowKind::Hann, layout.frame_len);
    const MelFilterbank bank = build_filterbank(config, layout.fft_size, clip.sample_rate);
    const int n_bins = layout.fft_size / 2 + 1;

    Eigen::MatrixXd mel(static_cast<Eigen::Index>(frames.size()), config.n_mels);
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const ComplexSpectrum spectrum = fft(frames[t].cwiseProduct(window), layout.fft_size);
        const Eigen::VectorXd power = power_spectrum(spectrum).head(n_bins);
        mel.row(static_cast<Eigen::Index>(t)) =
            ((bank.weights * power).array() + kLogFloor).log().transpose();
    }
    return mel;
}

MfccMatrix mfcc(const AudioClip& clip, const CepstralConfig& config) {
    const FrameLayout layout = layout_for(config, clip.sample_rate);
    const Eigen::MatrixXd mel = mel_spectrogram(clip, config);

    MfccMatrix out;
    out.coeffs.resize(mel.rows(), config.n_coeffs);
    out.frame_times.resize(mel.rows());
    for (Eigen::Index t = 0; t < mel.rows(); ++t) {
        out.coeffs.row(t) = dct_ii(mel.row(t).transpose()).head(config.n_coeffs).transpose();
        out.frame_times(t) =
            (t * layout.hop + 0.5 * layout.frame_len) / static_cast<double>(clip.sample_rate);
    }
    return out;
}

MfccMatrix delta(const MfccMatrix& matrix) {
    MfccMatrix out;
    out.frame_times = matrix.frame_times;
    out.coeffs = Eigen::MatrixXd::Zero(matrix.coeffs.rows(), matrix.coeffs.cols());
    for (Eigen::Index t = 1; t < matrix.coeffs.rows(); ++t) {
        out.coeffs.row(t) = matrix.coeffs.row(t) - matrix.coeffs.row(t - 1);
    }
    return out;
}

MfccMatrix delta2(const MfccMatrix& matrix) {
    return delta(delta(matrix));
}

std::string dump_mfcc(const MfccMatrix& matrix) {
    return dump_matrix(matrix.coeffs);
}

}  // namespace bispeech
