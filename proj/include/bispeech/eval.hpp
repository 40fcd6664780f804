#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bispeech/classify.hpp"

namespace bispeech {

// Rows are true classes, columns predicted.
struct ConfusionMatrix {
    Eigen::MatrixXi counts;
    std::vector<std::string> classes;

    long long total() const { return counts.sum(); }
    double accuracy() const;
    std::string to_text() const;
};

ConfusionMatrix confusion(const std::vector<std::string>& true_labels,
                          const std::vector<std::string>& predicted_labels,
                          const std::vector<std::string>& classes);

struct RocPoint {
    double threshold;
    double false_positive_rate;
    double true_positive_rate;
};

struct RocReport {
    enum class Averaging { Binary, MacroOvR };
    std::vector<RocPoint> points;  // empty in macro mode
    double auc = 0.0;
    Averaging averaging = Averaging::Binary;
};

// Threshold sweep over the unique scores (ties collapse into one step),
// trapezoid-rule AUC.
RocReport roc_auc(const std::vector<std::string>& true_labels, const Eigen::VectorXd& scores,
                  const std::string& positive_class);

// Macro-averaged one-vs-rest AUC. score_matrix columns align with `classes`;
// classes absent from the labels are skipped.
RocReport macro_ovr_auc(const std::vector<std::string>& true_labels,
                        const Eigen::MatrixXd& score_matrix,
                        const std::vector<std::string>& classes);

struct CrossValidationSummary {
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
    ConfusionMatrix pooled_confusion;
    double auc = 0.0;
    RocReport::Averaging auc_averaging = RocReport::Averaging::Binary;
    std::vector<Standardizer> fold_standardizers;  // fitted on each fold's training part only
};

// k-fold cross-validation: per fold, the standardizer and model are fitted
// on the training part only and validation predictions are pooled. Binary
// problems report pooled-score AUC for the later class in sorted order,
// multi-class problems the macro one-vs-rest average.
CrossValidationSummary cross_validate(ModelKind kind, const Eigen::MatrixXd& features,
                                      const std::vector<std::string>& labels, int k,
                                      std::uint64_t seed, const TrainOptions& options = {});

// Machine-readable report: metric,fold,value rows.
void write_report_csv(const std::string& path, const CrossValidationSummary& summary);

}  // namespace bispeech
