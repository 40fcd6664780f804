#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bispeech/audio_io.hpp"
#include "bispeech/dsp_core.hpp"

namespace bispeech {

struct BispectralConfig {
    int target_segments = 100;               // K
    int segment_fft_size = 64;               // power of two, >= 8
    WindowKind window = WindowKind::Hann;
};

// Third-order spectral grids over (k1, k2), k1,k2 in [0, fft_size/2).
// valid_mask marks bins with k1 + k2 < fft_size/2 (sum frequency below
// Nyquist); everything outside the mask is held at zero.
//
// Raw grids: magnitude holds the segment-averaged triple products,
// phase holds per-segment-wrapped averaged phase sums in (-pi, pi].
// After normalize_grid both lie in [0, 1].
struct BicoherenceGrid {
    Eigen::MatrixXd magnitude;
    Eigen::MatrixXd phase;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> valid_mask;
    bool normalized = false;
};

// Maps any angle to (-pi, pi].
double wrap_angle(double radians);

// Cuts the clip into non-overlapping segments and prepares each one for the
// estimator: the clip is divided into K = target_segments consecutive pieces
// of floor(N/K) samples (remainder dropped). Pieces longer than the segment
// FFT size keep only their head; the retained samples are windowed at their
// own length and zero-padded up to segment_fft_size. Clips shorter than K
// samples fall back to consecutive full FFT-size segments, so the returned
// count lies in [2, K]; fewer than 2 obtainable segments is ClipTooShort.
std::vector<Eigen::VectorXd> segment_clip(const AudioClip& clip, const BispectralConfig& config);

// Triple product for one segment: entry (k1, k2) = Y(k1)*Y(k2)*conj(Y(k1+k2))
// on the valid triangle, zero elsewhere. Matrix is (fft/2) x (fft/2).
Eigen::MatrixXcd segment_bispectrum(const ComplexSpectrum& spectrum);

// Segment-averaged magnitude and phase grids (raw, pre-normalization):
//   magnitude(k1,k2) = (1/K) * sum_K |Y_K(k1)| |Y_K(k2)| |Y_K(k1+k2)|
//   phase(k1,k2)     = (1/K) * sum_K wrap(ang Y_K(k1) + ang Y_K(k2) - ang Y_K(k1+k2))
BicoherenceGrid averaged_bispectrum(const std::vector<Eigen::VectorXd>& segments,
                                    const BispectralConfig& config);

// Classic segment-averaged bicoherence, bounded in [0, 1]:
//   b(k1,k2) = |sum_K Y(k1)Y(k2)conj(Y(k1+k2))|
//              / sqrt(sum_K |Y(k1)Y(k2)|^2 * sum_K |Y(k1+k2)|^2)
// Bins with zero denominator are defined as 0.
Eigen::MatrixXd bicoherence(const std::vector<Eigen::VectorXd>& segments,
                            const BispectralConfig& config);

// Min-max scales the magnitude over valid bins to [0,1] (constant grids map
// to all-zeros) and maps phase affinely from (-pi, pi] to [0,1]. Already
// normalized grids pass through unchanged.
BicoherenceGrid normalize_grid(const BicoherenceGrid& grid);

// Full pipeline: segment, average, normalize. Raises DegenerateSignal when
// the raw magnitude grid is constant (e.g. digital silence) and min-max
// normalization would be meaningless.
BicoherenceGrid bicoherence_grid(const AudioClip& clip, const BispectralConfig& config);

// Valid-mask entries of a grid plane, flattened row-major.
Eigen::VectorXd valid_values(const Eigen::MatrixXd& plane,
                             const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& mask);

// Flat numeric text dump, one matrix row per line, for debugging and tests.
std::string dump_matrix(const Eigen::MatrixXd& matrix);

}  // namespace bispeech
