#include "bispeech/bispectrum.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>

#include "bispeech/error.hpp"

namespace bispeech {

namespace {

void validate_config(const BispectralConfig& config) {
    if (config.target_segments < 2) {
        fail(ErrorCode::InvalidArgument, "target_segments must be at least 2");
    }
    if (config.segment_fft_size < 8 || !is_power_of_two(config.segment_fft_size)) {
        fail(ErrorCode::InvalidArgument, "segment_fft_size must be a power of two >= 8");
    }
}

struct SegmentSpectra {
    // Per segment: |Y| and arg(Y) for bins [0, fft/2), plus the raw bins.
    std::vector<Eigen::VectorXd> abs;
    std::vector<Eigen::VectorXd> arg;
    std::vector<Eigen::VectorXcd> bins;
    int half = 0;
};

SegmentSpectra transform_segments(const std::vector<Eigen::VectorXd>& segments,
                                  const BispectralConfig& config) {
    validate_config(config);
    if (segments.size() < 2) {
        fail(ErrorCode::TooFewSegments, "need at least 2 segments, got " +
                                            std::to_string(segments.size()));
    }
    SegmentSpectra out;
    out.half = config.segment_fft_size / 2;
    out.abs.reserve(segments.size());
    out.arg.reserve(segments.size());
    out.bins.reserve(segments.size());
    for (const auto& segment : segments) {
        ComplexSpectrum spectrum = fft(segment, config.segment_fft_size);
        Eigen::VectorXd mag(out.half), ang(out.half);
        for (int k = 0; k < out.half; ++k) {
            mag(k) = std::abs(spectrum.bins(k));
            ang(k) = std::arg(spectrum.bins(k));
        }
        out.abs.push_back(std::move(mag));
        out.arg.push_back(std::move(ang));
        out.bins.push_back(spectrum.bins.head(out.half));
    }
    return out;
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> make_mask(int half) {
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask(half, half);
    for (int k1 = 0; k1 < half; ++k1) {
        for (int k2 = 0; k2 < half; ++k2) {
            mask(k1, k2) = k1 + k2 < half;
        }
    }
    return mask;
}

}  // namespace

double wrap_angle(double radians) {
    double r = std::fmod(radians + M_PI, 2.0 * M_PI);
    if (r <= 0.0) r += 2.0 * M_PI;
    return r - M_PI;
}

std::vector<Eigen::VectorXd> segment_clip(const AudioClip& clip, const BispectralConfig& config) {
    validate_config(config);
    const Eigen::Index n = clip.samples.size();
    const int fft_size = config.segment_fft_size;

    Eigen::Index seg_len = n / config.target_segments;
    Eigen::Index count;
    if (seg_len >= 1) {
        count = config.target_segments;
    } else {
        // Clip shorter than K samples: take as many full FFT-size segments
        // as fit instead.
        seg_len = fft_size;
        count = n / seg_len;
    }
    if (count < 2) {
        fail(ErrorCode::ClipTooShort, "clip of " + std::to_string(n) +
                                          " samples yields fewer than 2 segments");
    }

    const Eigen::Index kept = std::min<Eigen::Index>(seg_len, fft_size);
    const Eigen::VectorXd window = make_window(config.window, static_cast<int>(kept));
    std::vector<Eigen::VectorXd> segments;
    segments.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) {
        Eigen::VectorXd frame = Eigen::VectorXd::Zero(fft_size);
        frame.head(kept) = clip.samples.segment(i * seg_len, kept).cwiseProduct(window);
        segments.push_back(std::move(frame));
    }
    return segments;
}

Eigen::MatrixXcd segment_bispectrum(const ComplexSpectrum& spectrum) {
    const int half = spectrum.fft_size / 2;
    Eigen::MatrixXcd grid = Eigen::MatrixXcd::Zero(half, half);
    for (int k1 = 0; k1 < half; ++k1) {
        for (int k2 = 0; k2 + k1 < half; ++k2) {
            grid(k1, k2) = spectrum.bins(k1) * spectrum.bins(k2) * std::conj(spectrum.bins(k1 + k2));
        }
    }
    return grid;
}

BicoherenceGrid averaged_bispectrum(const std::vector<Eigen::VectorXd>& segments,
                                    const BispectralConfig& config) {
    const SegmentSpectra spectra = transform_segments(segments, config);
    const int half = spectra.half;

    BicoherenceGrid grid;
    grid.magnitude = Eigen::MatrixXd::Zero(half, half);
    grid.phase = Eigen::MatrixXd::Zero(half, half);
    grid.valid_mask = make_mask(half);
    grid.normalized = false;

    const double inv_count = 1.0 / static_cast<double>(segments.size());
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const Eigen::VectorXd& mag = spectra.abs[s];
        const Eigen::VectorXd& ang = spectra.arg[s];
        for (int k1 = 0; k1 < half; ++k1) {
            for (int k2 = 0; k2 + k1 < half; ++k2) {
                grid.magnitude(k1, k2) += mag(k1) * mag(k2) * mag(k1 + k2);
                grid.phase(k1, k2) += wrap_angle(ang(k1) + ang(k2) - ang(k1 + k2));
            }
        }
    }
    grid.magnitude *= inv_count;
    grid.phase *= inv_count;
    return grid;
}

Eigen::MatrixXd bicoherence(const std::vector<Eigen::VectorXd>& segments,
                            const BispectralConfig& config) {
    const SegmentSpectra spectra = transform_segments(segments, config);
    const int half = spectra.half;

    Eigen::MatrixXcd numerator = Eigen::MatrixXcd::Zero(half, half);
    Eigen::MatrixXd den_pair = Eigen::MatrixXd::Zero(half, half);
    Eigen::MatrixXd den_sum = Eigen::MatrixXd::Zero(half, half);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const Eigen::VectorXcd& bins = spectra.bins[s];
        for (int k1 = 0; k1 < half; ++k1) {
            for (int k2 = 0; k2 + k1 < half; ++k2) {
                const std::complex<double> pair = bins(k1) * bins(k2);
                numerator(k1, k2) += pair * std::conj(bins(k1 + k2));
                den_pair(k1, k2) += std::norm(pair);
                den_sum(k1, k2) += std::norm(bins(k1 + k2));
            }
        }
    }

    Eigen::MatrixXd result = Eigen::MatrixXd::Zero(half, half);
    for (int k1 = 0; k1 < half; ++k1) {
        for (int k2 = 0; k2 + k1 < half; ++k2) {
            const double denom = std::sqrt(den_pair(k1, k2) * den_sum(k1, k2));
            result(k1, k2) = denom > 0.0 ? std::abs(numerator(k1, k2)) / denom : 0.0;
        }
    }
    return result;
}

BicoherenceGrid normalize_grid(const BicoherenceGrid& grid) {
    if (grid.normalized) return grid;

    BicoherenceGrid out;
    out.valid_mask = grid.valid_mask;
    out.normalized = true;
    const Eigen::Index rows = grid.magnitude.rows();
    const Eigen::Index cols = grid.magnitude.cols();
    out.magnitude = Eigen::MatrixXd::Zero(rows, cols);
    out.phase = Eigen::MatrixXd::Zero(rows, cols);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k1 = 0; k1 < rows; ++k1) {
        for (Eigen::Index k2 = 0; k2 < cols; ++k2) {
            if (!grid.valid_mask(k1, k2)) continue;
            lo = std::min(lo, grid.magnitude(k1, k2));
            hi = std::max(hi, grid.magnitude(k1, k2));
        }
    }
    const double span = hi - lo;
    for (Eigen::Index k1 = 0; k1 < rows; ++k1) {
        for (Eigen::Index k2 = 0; k2 < cols; ++k2) {
            if (!grid.valid_mask(k1, k2)) continue;
            out.magnitude(k1, k2) = span > 0.0 ? (grid.magnitude(k1, k2) - lo) / span : 0.0;
            out.phase(k1, k2) = (grid.phase(k1, k2) + M_PI) / (2.0 * M_PI);
        }
    }
    return out;
}

BicoherenceGrid bicoherence_grid(const AudioClip& clip, const BispectralConfig& config) {
    const std::vector<Eigen::VectorXd> segments = segment_clip(clip, config);
    const BicoherenceGrid raw = averaged_bispectrum(segments, config);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k1 = 0; k1 < raw.magnitude.rows(); ++k1) {
        for (Eigen::Index k2 = 0; k2 < raw.magnitude.cols(); ++k2) {
            if (!raw.valid_mask(k1, k2)) continue;
            lo = std::min(lo, raw.magnitude(k1, k2));
            hi = std::max(hi, raw.magnitude(k1, k2));
        }
    }
    if (!(hi > lo)) {
        fail(ErrorCode::DegenerateSignal,
             "constant bispectral magnitude grid (clip " + clip.source_path + ")");
    }
    return normalize_grid(raw);
}

Eigen::VectorXd valid_values(const Eigen::MatrixXd& plane,
                             const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& mask) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(plane.size()));
    for (Eigen::Index r = 0; r < plane.rows(); ++r) {
        for (Eigen::Index c = 0; c < plane.cols(); ++c) {
            if (mask(r, c)) values.push_back(plane(r, c));
        }
    }
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string dump_matrix(const Eigen::MatrixXd& matrix) {
    std::string out;
    char buffer[64];
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
            std::snprintf(buffer, sizeof buffer, "%.17g", matrix(r, c));
            if (c > 0) out += ' ';
            out += buffer;
        }
        out += '\n';
    }
    return out;
}

}  // namespace bispeech
