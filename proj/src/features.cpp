#include "bispeech/features.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bispeech/error.hpp"

namespace bispeech {

namespace {

constexpr double kDegenerateVariance = 1e-24;

void append_moments(Eigen::Matrix<double, kFeatureCount, 1>& out, int offset, const Moments& m) {
    out(offset + 0) = m.mean;
    out(offset + 1) = m.variance;
    out(offset + 2) = m.skewness;
    out(offset + 3) = m.kurtosis;
}

Moments matrix_mean_var(const Eigen::MatrixXd& matrix) {
    return moments(Eigen::Map<const Eigen::VectorXd>(matrix.data(), matrix.size()));
}

}  // namespace

Moments moments(const Eigen::VectorXd& values) {
    if (values.size() == 0) fail(ErrorCode::EmptyInput, "moments of empty input");
    const double n = static_cast<double>(values.size());
    Moments m;
    m.mean = values.mean();
    const Eigen::ArrayXd centered = values.array() - m.mean;
    m.variance = centered.square().sum() / n;
    if (m.variance < kDegenerateVariance) {
        m.skewness = 0.0;
        m.kurtosis = 0.0;
        return m;
    }
    const double sd = std::sqrt(m.variance);
    const Eigen::ArrayXd standardized = centered / sd;
    m.skewness = standardized.cube().sum() / n;
    m.kurtosis = standardized.square().square().sum() / n;
    return m;
}

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = {
        "mag_mean",   "mag_var",   "mag_skew",   "mag_kurt",  "phase_mean", "phase_var",
        "phase_skew", "phase_kurt", "mfcc_mean",  "mfcc_var",  "delta_mean", "delta_var",
        "delta2_mean", "delta2_var"};
    return names;
}

FeatureVector extract_features(const AudioClip& clip, const BispectralConfig& bisp_config,
                               const CepstralConfig& cep_config, const std::string& label,
                               const FeatureOptions& options) {
    FeatureVector fv;
    fv.label = label;

    const std::vector<Eigen::VectorXd> segments = segment_clip(clip, bisp_config);
    const BicoherenceGrid grid = bicoherence_grid(clip, bisp_config);

    Eigen::VectorXd magnitude_values;
    if (options.magnitude_source == MagnitudeSource::ClassicEstimator) {
        const Eigen::MatrixXd classic = bicoherence(segments, bisp_config);
        magnitude_values = valid_values(classic, grid.valid_mask);
    } else {
        magnitude_values = valid_values(grid.magnitude, grid.valid_mask);
    }
    append_moments(fv.values, 0, moments(magnitude_values));
    append_moments(fv.values, 4, moments(valid_values(grid.phase, grid.valid_mask)));

    const MfccMatrix cepstra = mfcc(clip, cep_config);
    const MfccMatrix d1 = delta(cepstra);
    const MfccMatrix d2 = delta(d1);
    const Moments m_mfcc = matrix_mean_var(cepstra.coeffs);
    const Moments m_d1 = matrix_mean_var(d1.coeffs);
    const Moments m_d2 = matrix_mean_var(d2.coeffs);
    fv.values(8) = m_mfcc.mean;
    fv.values(9) = m_mfcc.variance;
    fv.values(10) = m_d1.mean;
    fv.values(11) = m_d1.variance;
    fv.values(12) = m_d2.mean;
    fv.values(13) = m_d2.variance;

    if (!fv.values.allFinite()) {
        fail(ErrorCode::DegenerateSignal, "non-finite feature for " + clip.source_path);
    }
    return fv;
}

void write_feature_csv(const std::string& path, const std::vector<FeatureVector>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    const auto& names = feature_names();
    for (int i = 0; i < kFeatureCount; ++i) out << names[i] << ',';
    out << "label\n";
    char buffer[64];
    for (const auto& row : rows) {
        for (int i = 0; i < kFeatureCount; ++i) {
            std::snprintf(buffer, sizeof buffer, "%.17g", row.values(i));
            out << buffer << ',';
        }
        out << row.label << '\n';
    }
    if (!out) fail(ErrorCode::IoFailure, "short write to " + path);
}

std::vector<FeatureVector> read_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::IoFailure, path + " is empty");

    std::vector<FeatureVector> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        FeatureVector fv;
        for (int i = 0; i < kFeatureCount; ++i) {
            if (!std::getline(ss, cell, ',')) {
                fail(ErrorCode::IoFailure,
                     path + ":" + std::to_string(line_no) + ": expected 15 columns");
            }
            try {
                fv.values(i) = std::stod(cell);
            } catch (const std::exception&) {
                fail(ErrorCode::IoFailure,
                     path + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
        }
        if (!std::getline(ss, cell)) {
            fail(ErrorCode::IoFailure, path + ":" + std::to_string(line_no) + ": missing label");
        }
        fv.label = cell;
        rows.push_back(std::move(fv));
    }
    return rows;
}

}  // namespace bispeech
