#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "bispeech/audio_io.hpp"
#include "bispeech/bispectrum.hpp"
#include "bispeech/cepstral.hpp"

namespace bispeech {

// First four statistical moments, population (1/N) forms throughout.
// Kurtosis is non-excess (a normal distribution scores 3). When variance is
// effectively zero the standardized moments are 0 by convention.
struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
};

Moments moments(const Eigen::VectorXd& values);

inline constexpr int kFeatureCount = 14;

// One sample's feature record: 8 bispectral moments, 6 cepstral aggregates,
// and the class tag.
struct FeatureVector {
    Eigen::Matrix<double, kFeatureCount, 1> values;
    std::string label;
};

// Fixed column order of the feature record (without the trailing label).
const std::array<std::string, kFeatureCount>& feature_names();

// Which grid feeds the magnitude moments: the min-max normalized averaged
// magnitude (default) or the classic bicoherence estimator (already [0,1]).
// Phase moments always come from the normalized averaged phase grid.
enum class MagnitudeSource { NormalizedAverage, ClassicEstimator };

struct FeatureOptions {
    MagnitudeSource magnitude_source = MagnitudeSource::NormalizedAverage;
};

FeatureVector extract_features(const AudioClip& clip, const BispectralConfig& bisp_config,
                               const CepstralConfig& cep_config, const std::string& label,
                               const FeatureOptions& options = {});

// Feature table serialization: 15-column CSV, header row, one row per clip.
void write_feature_csv(const std::string& path, const std::vector<FeatureVector>& rows);
std::vector<FeatureVector> read_feature_csv(const std::string& path);

}  // namespace bispeech
