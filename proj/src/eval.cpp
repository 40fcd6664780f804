#include "bispeech/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "bispeech/dataset.hpp"
#include "bispeech/error.hpp"

namespace bispeech {

double ConfusionMatrix::accuracy() const {
    const long long n = total();
    if (n == 0) return 0.0;
    return static_cast<double>(counts.diagonal().sum()) / static_cast<double>(n);
}

std::string ConfusionMatrix::to_text() const {
    std::ostringstream out;
    std::size_t width = 8;
    for (const auto& c : classes) width = std::max(width, c.size() + 2);
    out << std::string(width, ' ');
    for (const auto& c : classes) {
        out << c << std::string(width - c.size(), ' ');
    }
    out << '\n';
    for (Eigen::Index r = 0; r < counts.rows(); ++r) {
        const std::string& name = classes[static_cast<std::size_t>(r)];
        out << name << std::string(width - name.size(), ' ');
        for (Eigen::Index c = 0; c < counts.cols(); ++c) {
            const std::string cell = std::to_string(counts(r, c));
            out << cell << std::string(width - cell.size(), ' ');
        }
        out << '\n';
    }
    return out.str();
}

ConfusionMatrix confusion(const std::vector<std::string>& true_labels,
                          const std::vector<std::string>& predicted_labels,
                          const std::vector<std::string>& classes) {
    if (true_labels.size() != predicted_labels.size()) {
        fail(ErrorCode::LengthMismatch, "label sequences differ in length");
    }
    std::map<std::string, Eigen::Index> index;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        index[classes[i]] = static_cast<Eigen::Index>(i);
    }
    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(classes.size()),
                                      static_cast<Eigen::Index>(classes.size()));
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        const auto t = index.find(true_labels[i]);
        const auto p = index.find(predicted_labels[i]);
        if (t == index.end()) fail(ErrorCode::UnknownClass, true_labels[i]);
        if (p == index.end()) fail(ErrorCode::UnknownClass, predicted_labels[i]);
        ++cm.counts(t->second, p->second);
    }
    return cm;
}

RocReport roc_auc(const std::vector<std::string>& true_labels, const Eigen::VectorXd& scores,
                  const std::string& positive_class) {
    if (static_cast<Eigen::Index>(true_labels.size()) != scores.size()) {
        fail(ErrorCode::LengthMismatch, "labels and scores differ in length");
    }
    long long positives = 0;
    for (const auto& label : true_labels) positives += label == positive_class ? 1 : 0;
    const long long negatives = static_cast<long long>(true_labels.size()) - positives;
    if (positives == 0 || negatives == 0) {
        fail(ErrorCode::SingleClassLabels, "need both positive and negative labels");
    }

    std::vector<std::size_t> order(true_labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
        return scores(static_cast<Eigen::Index>(a)) > scores(static_cast<Eigen::Index>(b));
    });

    RocReport report;
    report.averaging = RocReport::Averaging::Binary;
    report.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    long long tp = 0, fp = 0;
    double auc = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        // Consume the whole tie group at this score as one threshold step.
        const double threshold = scores(static_cast<Eigen::Index>(order[i]));
        while (i < order.size() && scores(static_cast<Eigen::Index>(order[i])) == threshold) {
            if (true_labels[order[i]] == positive_class) {
                ++tp;
            } else {
                ++fp;
            }
            ++i;
        }
        const double fpr = static_cast<double>(fp) / static_cast<double>(negatives);
        const double tpr = static_cast<double>(tp) / static_cast<double>(positives);
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        report.points.push_back({threshold, fpr, tpr});
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    report.auc = auc;
    return report;
}

RocReport macro_ovr_auc(const std::vector<std::string>& true_labels,
                        const Eigen::MatrixXd& score_matrix,
                        const std::vector<std::string>& classes) {
    if (static_cast<Eigen::Index>(true_labels.size()) != score_matrix.rows() ||
        static_cast<Eigen::Index>(classes.size()) != score_matrix.cols()) {
        fail(ErrorCode::LengthMismatch, "score matrix shape disagrees with labels/classes");
    }
    double sum = 0.0;
    int used = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        long long positives = 0;
        for (const auto& label : true_labels) positives += label == classes[c] ? 1 : 0;
        if (positives == 0 || positives == static_cast<long long>(true_labels.size())) continue;
        sum += roc_auc(true_labels, score_matrix.col(static_cast<Eigen::Index>(c)), classes[c]).auc;
        ++used;
    }
    if (used == 0) fail(ErrorCode::SingleClassLabels, "no class has both kinds of labels");
    RocReport report;
    report.averaging = RocReport::Averaging::MacroOvR;
    report.auc = sum / used;
    return report;
}

CrossValidationSummary cross_validate(ModelKind kind, const Eigen::MatrixXd& features,
                                      const std::vector<std::string>& labels, int k,
                                      std::uint64_t seed, const TrainOptions& options) {
    if (static_cast<std::size_t>(features.rows()) != labels.size()) {
        fail(ErrorCode::LengthMismatch, "feature rows and labels disagree");
    }
    const std::vector<std::string> classes = [&labels] {
        std::vector<std::string> copy = labels;
        std::sort(copy.begin(), copy.end());
        copy.erase(std::unique(copy.begin(), copy.end()), copy.end());
        return copy;
    }();

    std::vector<int> indices(labels.size());
    std::iota(indices.begin(), indices.end(), 0);
    const std::vector<Fold> folds = kfold(indices, k, seed);

    CrossValidationSummary summary;
    std::vector<std::string> pooled_true;
    std::vector<std::string> pooled_pred;
    Eigen::MatrixXd pooled_scores(features.rows(), static_cast<Eigen::Index>(classes.size()));
    pooled_scores.setZero();

    for (std::size_t f = 0; f < folds.size(); ++f) {
        const Fold& fold = folds[f];
        Eigen::MatrixXd train_rows(static_cast<Eigen::Index>(fold.train.size()), features.cols());
        std::vector<std::string> train_labels;
        train_labels.reserve(fold.train.size());
        for (std::size_t i = 0; i < fold.train.size(); ++i) {
            train_rows.row(static_cast<Eigen::Index>(i)) = features.row(fold.train[i]);
            train_labels.push_back(labels[static_cast<std::size_t>(fold.train[i])]);
        }

        TrainedModel model;
        try {
            model = train(kind, train_rows, train_labels, options);
        } catch (const Error& e) {
            fail(e.code(), "fold " + std::to_string(f + 1) + ": " + e.what());
        }
        summary.fold_standardizers.push_back(model.standardizer);

        long long correct = 0;
        for (const int row : fold.validate) {
            const Eigen::VectorXd scores = predict_score(model, features.row(row).transpose());
            Eigen::Index best = 0;
            scores.maxCoeff(&best);
            const std::string& predicted = model.classes[static_cast<std::size_t>(best)];
            pooled_true.push_back(labels[static_cast<std::size_t>(row)]);
            pooled_pred.push_back(predicted);
            correct += predicted == labels[static_cast<std::size_t>(row)] ? 1 : 0;
            // Scores land in the global class columns; classes the fold never
            // saw keep a zero score.
            for (std::size_t c = 0; c < model.classes.size(); ++c) {
                const auto it = std::lower_bound(classes.begin(), classes.end(), model.classes[c]);
                pooled_scores(row, static_cast<Eigen::Index>(it - classes.begin())) =
                    scores(static_cast<Eigen::Index>(c));
            }
        }
        summary.fold_accuracies.push_back(static_cast<double>(correct) /
                                          static_cast<double>(fold.validate.size()));
    }

    summary.mean_accuracy =
        std::accumulate(summary.fold_accuracies.begin(), summary.fold_accuracies.end(), 0.0) /
        static_cast<double>(summary.fold_accuracies.size());

    // Pooled predictions arrive in fold order; rebuild label order for the
    // confusion matrix from the fold structure the same way.
    summary.pooled_confusion = confusion(pooled_true, pooled_pred, classes);

    std::vector<std::string> row_labels(labels.begin(), labels.end());
    if (classes.size() == 2) {
        summary.auc_averaging = RocReport::Averaging::Binary;
        summary.auc = roc_auc(row_labels, pooled_scores.col(1), classes[1]).auc;
    } else {
        summary.auc_averaging = RocReport::Averaging::MacroOvR;
        summary.auc = macro_ovr_auc(row_labels, pooled_scores, classes).auc;
    }
    return summary;
}

void write_report_csv(const std::string& path, const CrossValidationSummary& summary) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    char buffer[64];
    out << "metric,fold,value\n";
    for (std::size_t f = 0; f < summary.fold_accuracies.size(); ++f) {
        std::snprintf(buffer, sizeof buffer, "%.17g", summary.fold_accuracies[f]);
        out << "accuracy," << f + 1 << ',' << buffer << '\n';
    }
    std::snprintf(buffer, sizeof buffer, "%.17g", summary.mean_accuracy);
    out << "accuracy,mean," << buffer << '\n';
    std::snprintf(buffer, sizeof buffer, "%.17g", summary.auc);
    out << (summary.auc_averaging == RocReport::Averaging::Binary ? "auc,binary," : "auc,macro_ovr,")
        << buffer << '\n';
    if (!out) fail(ErrorCode::IoFailure, "short write to " + path);
}

}  // namespace bispeech
