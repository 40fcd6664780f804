#include "bispeech/classify.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "bispeech/error.hpp"

namespace bispeech {

namespace {

constexpr double kMinStd = 1e-12;
constexpr double kWeightCap = 1e12;
constexpr double kAlphaFloor = 1e-10;

// ----- shared helpers -----

std::vector<std::string> sorted_classes(const std::vector<std::string>& labels) {
    std::set<std::string> unique(labels.begin(), labels.end());
    return {unique.begin(), unique.end()};
}

std::vector<int> label_indices(const std::vector<std::string>& labels,
                               const std::vector<std::string>& classes) {
    std::vector<int> out;
    out.reserve(labels.size());
    for (const auto& label : labels) {
        const auto it = std::lower_bound(classes.begin(), classes.end(), label);
        out.push_back(static_cast<int>(it - classes.begin()));
    }
    return out;
}

Eigen::VectorXd softmax_from_log(const Eigen::VectorXd& log_scores) {
    const double peak = log_scores.maxCoeff();
    Eigen::VectorXd p = (log_scores.array() - peak).exp();
    return p / p.sum();
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double softplus(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

// ----- gaussian discriminants -----

LdaPayload fit_lda(const Eigen::MatrixXd& z, const std::vector<int>& y, int n_classes,
                   double ridge) {
    const Eigen::Index dim = z.cols();
    LdaPayload payload;
    payload.means = Eigen::MatrixXd::Zero(n_classes, dim);
    payload.log_priors.resize(n_classes);

    Eigen::VectorXi counts = Eigen::VectorXi::Zero(n_classes);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        payload.means.row(y[static_cast<std::size_t>(i)]) += z.row(i);
        ++counts(y[static_cast<std::size_t>(i)]);
    }
    for (int c = 0; c < n_classes; ++c) {
        payload.means.row(c) /= counts(c);
        payload.log_priors(c) = std::log(static_cast<double>(counts(c)) / z.rows());
    }

    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const Eigen::VectorXd d = z.row(i).transpose() -
                                  payload.means.row(y[static_cast<std::size_t>(i)]).transpose();
        pooled += d * d.transpose();
    }
    pooled /= static_cast<double>(z.rows());
    pooled += ridge * Eigen::MatrixXd::Identity(dim, dim);

    const Eigen::LLT<Eigen::MatrixXd> llt(pooled);
    if (llt.info() != Eigen::Success) {
        fail(ErrorCode::SingularCovariance, "pooled covariance is not positive definite");
    }
    payload.precision = llt.solve(Eigen::MatrixXd::Identity(dim, dim));
    return payload;
}

QdaPayload fit_qda(const Eigen::MatrixXd& z, const std::vector<int>& y, int n_classes,
                   double ridge) {
    const Eigen::Index dim = z.cols();
    QdaPayload payload;
    payload.means = Eigen::MatrixXd::Zero(n_classes, dim);
    payload.log_dets.resize(n_classes);
    payload.log_priors.resize(n_classes);
    payload.precisions.resize(static_cast<std::size_t>(n_classes));

    for (int c = 0; c < n_classes; ++c) {
        std::vector<Eigen::Index> rows;
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            if (y[static_cast<std::size_t>(i)] == c) rows.push_back(i);
        }
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
        for (const auto r : rows) mean += z.row(r).transpose();
        mean /= static_cast<double>(rows.size());
        payload.means.row(c) = mean.transpose();
        payload.log_priors(c) = std::log(static_cast<double>(rows.size()) / z.rows());

        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
        for (const auto r : rows) {
            const Eigen::VectorXd d = z.row(r).transpose() - mean;
            cov += d * d.transpose();
        }
        cov /= static_cast<double>(rows.size());
        cov += ridge * Eigen::MatrixXd::Identity(dim, dim);

        const Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) {
            fail(ErrorCode::SingularCovariance,
                 "class covariance is not positive definite despite regularization");
        }
        double log_det = 0.0;
        const Eigen::MatrixXd l = llt.matrixL();
        for (Eigen::Index i = 0; i < dim; ++i) log_det += 2.0 * std::log(l(i, i));
        payload.log_dets(c) = log_det;
        payload.precisions[static_cast<std::size_t>(c)] =
            llt.solve(Eigen::MatrixXd::Identity(dim, dim));
    }
    return payload;
}

// ----- logistic regression -----

Eigen::MatrixXd augment_ones(const Eigen::MatrixXd& rows) {
    Eigen::MatrixXd aug(rows.rows(), rows.cols() + 1);
    aug.leftCols(rows.cols()) = rows;
    aug.col(rows.cols()).setOnes();
    return aug;
}

LogisticPair fit_logistic_pair(const Eigen::MatrixXd& z, const Eigen::VectorXd& targets,
                               int first, int second, const TrainOptions& options) {
    const Eigen::MatrixXd aug = augment_ones(z);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(aug.cols());

    auto [loss, grad] = logistic_loss_and_gradient(w, z, targets);
    for (int iter = 0; iter < options.logistic_max_iters; ++iter) {
        if (grad.norm() < options.logistic_tolerance) break;
        // Backtracking line search (Armijo, halving steps).
        double step = 1.0;
        const double slope = grad.squaredNorm();
        double next_loss = loss;
        Eigen::VectorXd next_w = w;
        for (int halvings = 0; halvings < 60; ++halvings) {
            next_w = w - step * grad;
            next_loss = logistic_loss_and_gradient(next_w, z, targets).first;
            if (next_loss <= loss - 1e-4 * step * slope) break;
            step *= 0.5;
        }
        if (next_loss >= loss) break;  // no progress at the smallest step
        w = next_w;
        std::tie(loss, grad) = logistic_loss_and_gradient(w, z, targets);
    }

    LogisticPair pair;
    pair.first = first;
    pair.second = second;
    pair.weights = w.head(w.size() - 1);
    pair.bias = w(w.size() - 1);
    return pair;
}

// ----- SVM / SMO -----

struct SmoProblem {
    const Eigen::MatrixXd& kernel;
    const Eigen::VectorXd& y;
    Eigen::VectorXd alpha;
    double b = 0.0;
    double c;
    double tol;

    double decision(Eigen::Index i) const {
        double f = b;
        for (Eigen::Index j = 0; j < alpha.size(); ++j) {
            if (alpha(j) > 0.0) f += alpha(j) * y(j) * kernel(j, i);
        }
        return f;
    }

    bool take_step(Eigen::Index i, Eigen::Index j) {
        if (i == j) return false;
        const double ei = decision(i) - y(i);
        const double ej = decision(j) - y(j);
        const double ai_old = alpha(i);
        const double aj_old = alpha(j);
        double lo, hi;
        if (y(i) != y(j)) {
            lo = std::max(0.0, aj_old - ai_old);
            hi = std::min(c, c + aj_old - ai_old);
        } else {
            lo = std::max(0.0, ai_old + aj_old - c);
            hi = std::min(c, ai_old + aj_old);
        }
        if (lo >= hi) return false;
        const double eta = 2.0 * kernel(i, j) - kernel(i, i) - kernel(j, j);
        if (eta >= 0.0) return false;

        double aj = aj_old - y(j) * (ei - ej) / eta;
        aj = std::clamp(aj, lo, hi);
        if (std::abs(aj - aj_old) < 1e-8) return false;
        const double ai = ai_old + y(i) * y(j) * (aj_old - aj);
        alpha(i) = ai;
        alpha(j) = aj;

        const double b1 = b - ei - y(i) * (ai - ai_old) * kernel(i, i) -
                          y(j) * (aj - aj_old) * kernel(i, j);
        const double b2 = b - ej - y(i) * (ai - ai_old) * kernel(i, j) -
                          y(j) * (aj - aj_old) * kernel(j, j);
        if (ai > 0.0 && ai < c) {
            b = b1;
        } else if (aj > 0.0 && aj < c) {
            b = b2;
        } else {
            b = 0.5 * (b1 + b2);
        }
        return true;
    }
};

SvmPair fit_svm_pair(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, int first, int second,
                     const SvmParams& params) {
    const Eigen::Index n = z.rows();
    Eigen::MatrixXd kernel(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            kernel(i, j) = kernel(j, i) = kernel_value(params, z.row(i), z.row(j));
        }
    }

    SmoProblem problem{kernel, y, Eigen::VectorXd::Zero(n), 0.0, params.box_constraint,
                       params.tolerance};

    for (int sweep = 0; sweep < params.max_passes; ++sweep) {
        int changed = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ei = problem.decision(i) - y(i);
            const double r = y(i) * ei;
            const bool violates = (r < -params.tolerance && problem.alpha(i) < problem.c) ||
                                  (r > params.tolerance && problem.alpha(i) > 0.0);
            if (!violates) continue;

            // Second choice: largest |E_i - E_j| first, then a plain scan.
            Eigen::Index best = -1;
            double best_gap = -1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                const double gap = std::abs(ei - (problem.decision(j) - y(j)));
                if (gap > best_gap) {
                    best_gap = gap;
                    best = j;
                }
            }
            bool progressed = best >= 0 && problem.take_step(i, best);
            for (Eigen::Index j = 0; !progressed && j < n; ++j) {
                if (j != best) progressed = problem.take_step(i, j);
            }
            if (progressed) ++changed;
        }
        if (changed == 0) break;  // all KKT conditions hold within tolerance
    }

    SvmPair pair;
    pair.first = first;
    pair.second = second;
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (problem.alpha(i) > kAlphaFloor) support.push_back(i);
    }
    pair.support.resize(static_cast<Eigen::Index>(support.size()), z.cols());
    pair.coefficients.resize(static_cast<Eigen::Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) {
        pair.support.row(static_cast<Eigen::Index>(s)) = z.row(support[s]);
        pair.coefficients(static_cast<Eigen::Index>(s)) =
            problem.alpha(support[s]) * y(support[s]);
    }
    pair.bias = problem.b;
    return pair;
}

double svm_decision(const SvmPair& pair, const SvmParams& params, const Eigen::VectorXd& x) {
    double f = pair.bias;
    for (Eigen::Index s = 0; s < pair.support.rows(); ++s) {
        f += pair.coefficients(s) * kernel_value(params, pair.support.row(s), x);
    }
    return f;
}

// Builds the (first, second) sub-problem rows for a one-vs-one pair.
// Targets are 0 for `first`, 1 for `second`.
void ovo_subproblem(const Eigen::MatrixXd& z, const std::vector<int>& y, int first, int second,
                    Eigen::MatrixXd& rows, Eigen::VectorXd& targets) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const int c = y[static_cast<std::size_t>(i)];
        if (c == first || c == second) keep.push_back(i);
    }
    rows.resize(static_cast<Eigen::Index>(keep.size()), z.cols());
    targets.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        rows.row(static_cast<Eigen::Index>(i)) = z.row(keep[i]);
        targets(static_cast<Eigen::Index>(i)) =
            y[static_cast<std::size_t>(keep[i])] == second ? 1.0 : 0.0;
    }
}

}  // namespace

// ----- Standardizer -----

Standardizer Standardizer::fit(const Eigen::MatrixXd& rows) {
    if (rows.rows() < 2) fail(ErrorCode::TooFewRows, "standardizer needs at least 2 rows");
    Eigen::VectorXd mean(rows.cols());
    Eigen::VectorXd scale(rows.cols());
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
        const double mu = rows.col(c).mean();
        const double var = (rows.col(c).array() - mu).square().sum() / rows.rows();
        const double sd = std::sqrt(var);
        if (sd < kMinStd) {
            mean(c) = 0.0;
            scale(c) = 1.0;
        } else {
            mean(c) = mu;
            scale(c) = sd;
        }
    }
    return Standardizer(std::move(mean), std::move(scale));
}

Eigen::VectorXd Standardizer::transform(const Eigen::VectorXd& x) const {
    if (x.size() != mean_.size()) {
        fail(ErrorCode::DimensionMismatch, "standardizer expects " + std::to_string(mean_.size()) +
                                               " features, got " + std::to_string(x.size()));
    }
    return (x - mean_).cwiseQuotient(scale_);
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& rows) const {
    Eigen::MatrixXd out(rows.rows(), rows.cols());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        out.row(i) = transform(Eigen::VectorXd(rows.row(i))).transpose();
    }
    return out;
}

Eigen::VectorXd Standardizer::inverse_transform(const Eigen::VectorXd& z) const {
    if (z.size() != mean_.size()) {
        fail(ErrorCode::DimensionMismatch, "standardizer expects " + std::to_string(mean_.size()) +
                                               " features, got " + std::to_string(z.size()));
    }
    return z.cwiseProduct(scale_) + mean_;
}

// ----- kernels / kinds -----

double kernel_value(const SvmParams& params, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double scaled = a.dot(b) / (params.kernel_scale * params.kernel_scale);
    if (params.kernel == SvmParams::Kernel::Linear) return scaled;
    return std::pow(1.0 + scaled, params.degree);
}

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Knn: return "knn";
        case ModelKind::Lda: return "lda";
        case ModelKind::Qda: return "qda";
        case ModelKind::Logistic: return "logistic";
        case ModelKind::Svm: return "svm";
    }
    return "unknown";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "knn") return ModelKind::Knn;
    if (name == "lda") return ModelKind::Lda;
    if (name == "qda") return ModelKind::Qda;
    if (name == "logistic") return ModelKind::Logistic;
    if (name == "svm") return ModelKind::Svm;
    fail(ErrorCode::InvalidArgument, "unknown model kind '" + name + "'");
}

// ----- training -----

std::pair<double, Eigen::VectorXd> logistic_loss_and_gradient(const Eigen::VectorXd& weights_aug,
                                                              const Eigen::MatrixXd& rows,
                                                              const Eigen::VectorXd& targets) {
    const Eigen::MatrixXd aug = augment_ones(rows);
    if (weights_aug.size() != aug.cols() || targets.size() != rows.rows()) {
        fail(ErrorCode::DimensionMismatch, "logistic loss shapes disagree");
    }
    const Eigen::VectorXd margins = aug * weights_aug;
    double loss = 0.0;
    Eigen::VectorXd residual(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
        loss += softplus(margins(i)) - targets(i) * margins(i);
        residual(i) = sigmoid(margins(i)) - targets(i);
    }
    const double n = static_cast<double>(rows.rows());
    return {loss / n, aug.transpose() * residual / n};
}

TrainedModel train(ModelKind kind, const Eigen::MatrixXd& features,
                   const std::vector<std::string>& labels, const TrainOptions& options) {
    if (static_cast<std::size_t>(features.rows()) != labels.size()) {
        fail(ErrorCode::LengthMismatch, "feature rows and labels disagree");
    }
    TrainedModel model;
    model.kind = kind;
    model.classes = sorted_classes(labels);
    if (model.classes.size() < 2) {
        fail(ErrorCode::SingleClass, "training data contains a single class");
    }
    model.options = options;
    model.full_dim = static_cast<int>(features.cols());
    model.standardizer = Standardizer::fit(features);
    const Eigen::MatrixXd z = model.standardizer.transform(features);
    const std::vector<int> y = label_indices(labels, model.classes);
    const int n_classes = static_cast<int>(model.classes.size());

    switch (kind) {
        case ModelKind::Knn: {
            KnnPayload payload;
            payload.k = std::min<int>(options.knn_k, static_cast<int>(z.rows()));
            payload.points = z;
            payload.labels = y;
            model.payload = std::move(payload);
            break;
        }
        case ModelKind::Lda:
            model.payload = fit_lda(z, y, n_classes, options.covariance_ridge);
            break;
        case ModelKind::Qda:
            model.payload = fit_qda(z, y, n_classes, options.covariance_ridge);
            break;
        case ModelKind::Logistic: {
            LogisticPayload payload;
            for (int a = 0; a < n_classes; ++a) {
                for (int b = a + 1; b < n_classes; ++b) {
                    Eigen::MatrixXd rows;
                    Eigen::VectorXd targets;
                    ovo_subproblem(z, y, a, b, rows, targets);
                    payload.pairs.push_back(fit_logistic_pair(rows, targets, a, b, options));
                }
            }
            model.payload = std::move(payload);
            break;
        }
        case ModelKind::Svm: {
            SvmPayload payload;
            payload.params = options.svm;
            for (int a = 0; a < n_classes; ++a) {
                for (int b = a + 1; b < n_classes; ++b) {
                    Eigen::MatrixXd rows;
                    Eigen::VectorXd targets;
                    ovo_subproblem(z, y, a, b, rows, targets);
                    const Eigen::VectorXd signs = targets.array() * 2.0 - 1.0;
                    payload.pairs.push_back(fit_svm_pair(rows, signs, a, b, payload.params));
                }
            }
            model.payload = std::move(payload);
            break;
        }
    }
    return model;
}

// ----- prediction -----

namespace {

Eigen::VectorXd resolve_input(const TrainedModel& model, const Eigen::VectorXd& x) {
    const Eigen::Index trained = model.standardizer.dim();
    if (x.size() == trained) return x;
    if (!model.column_mask.empty() && x.size() == model.full_dim) {
        Eigen::VectorXd masked(static_cast<Eigen::Index>(model.column_mask.size()));
        for (std::size_t i = 0; i < model.column_mask.size(); ++i) {
            masked(static_cast<Eigen::Index>(i)) = x(model.column_mask[i]);
        }
        return masked;
    }
    fail(ErrorCode::DimensionMismatch, "input has " + std::to_string(x.size()) +
                                           " features, model expects " + std::to_string(trained));
}

Eigen::VectorXd score_knn(const KnnPayload& payload, int n_classes, const Eigen::VectorXd& z) {
    const Eigen::Index n = payload.points.rows();
    std::vector<std::pair<double, Eigen::Index>> order;
    order.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        order.emplace_back((payload.points.row(i).transpose() - z).norm(), i);
    }
    const auto k = static_cast<std::size_t>(std::min<Eigen::Index>(payload.k, n));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(n_classes);
    for (std::size_t i = 0; i < k; ++i) {
        const double d = order[i].first;
        const double w = d > 0.0 ? std::min(1.0 / d, kWeightCap) : kWeightCap;
        scores(payload.labels[static_cast<std::size_t>(order[i].second)]) += w;
    }
    return scores;
}

Eigen::VectorXd score_lda(const LdaPayload& payload, const Eigen::VectorXd& z) {
    const Eigen::Index n_classes = payload.means.rows();
    Eigen::VectorXd log_scores(n_classes);
    for (Eigen::Index c = 0; c < n_classes; ++c) {
        const Eigen::VectorXd d = z - payload.means.row(c).transpose();
        log_scores(c) = payload.log_priors(c) - 0.5 * d.dot(payload.precision * d);
    }
    return softmax_from_log(log_scores);
}

Eigen::VectorXd score_qda(const QdaPayload& payload, const Eigen::VectorXd& z) {
    const Eigen::Index n_classes = payload.means.rows();
    Eigen::VectorXd log_scores(n_classes);
    for (Eigen::Index c = 0; c < n_classes; ++c) {
        const Eigen::VectorXd d = z - payload.means.row(c).transpose();
        log_scores(c) = payload.log_priors(c) - 0.5 * payload.log_dets(c) -
                        0.5 * d.dot(payload.precisions[static_cast<std::size_t>(c)] * d);
    }
    return softmax_from_log(log_scores);
}

Eigen::VectorXd score_logistic(const LogisticPayload& payload, int n_classes,
                               const Eigen::VectorXd& z) {
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(n_classes);
    for (const auto& pair : payload.pairs) {
        const double p = sigmoid(pair.weights.dot(z) + pair.bias);
        scores(pair.second) += p;
        scores(pair.first) += 1.0 - p;
    }
    return scores / static_cast<double>(payload.pairs.size());
}

Eigen::VectorXd score_svm(const SvmPayload& payload, int n_classes, const Eigen::VectorXd& z) {
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(n_classes);
    for (const auto& pair : payload.pairs) {
        const double f = svm_decision(pair, payload.params, z);
        scores(pair.second) += f;
        scores(pair.first) -= f;
    }
    return scores;
}

}  // namespace

Eigen::VectorXd predict_score(const TrainedModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd z = model.standardizer.transform(resolve_input(model, x));
    const int n_classes = static_cast<int>(model.classes.size());
    if (const auto* knn = std::get_if<KnnPayload>(&model.payload)) {
        return score_knn(*knn, n_classes, z);
    }
    if (const auto* lda = std::get_if<LdaPayload>(&model.payload)) return score_lda(*lda, z);
    if (const auto* qda = std::get_if<QdaPayload>(&model.payload)) return score_qda(*qda, z);
    if (const auto* logistic = std::get_if<LogisticPayload>(&model.payload)) {
        return score_logistic(*logistic, n_classes, z);
    }
    return score_svm(std::get<SvmPayload>(model.payload), n_classes, z);
}

std::string predict(const TrainedModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd scores = predict_score(model, x);
    Eigen::Index best = 0;
    scores.maxCoeff(&best);  // first maximum wins ties: class-list order
    return model.classes[static_cast<std::size_t>(best)];
}

// ----- serialization -----

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json mat_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::VectorXd vec_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

Eigen::MatrixXd mat_from_json(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

json svm_params_to_json(const SvmParams& params) {
    return json{{"kernel", params.kernel == SvmParams::Kernel::Linear ? "linear" : "polynomial"},
                {"degree", params.degree},
                {"kernel_scale", params.kernel_scale},
                {"box_constraint", params.box_constraint},
                {"tolerance", params.tolerance},
                {"max_passes", params.max_passes}};
}

SvmParams svm_params_from_json(const json& j) {
    SvmParams params;
    params.kernel = j.at("kernel").get<std::string>() == "linear" ? SvmParams::Kernel::Linear
                                                                  : SvmParams::Kernel::Polynomial;
    params.degree = j.at("degree").get<int>();
    params.kernel_scale = j.at("kernel_scale").get<double>();
    params.box_constraint = j.at("box_constraint").get<double>();
    params.tolerance = j.at("tolerance").get<double>();
    params.max_passes = j.at("max_passes").get<int>();
    return params;
}

}  // namespace

void save_model(const std::string& path, const TrainedModel& model) {
    json doc;
    doc["format_version"] = 1;
    doc["kind"] = model_kind_name(model.kind);
    doc["classes"] = model.classes;
    doc["standardizer"] = {{"mean", vec_to_json(model.standardizer.mean())},
                           {"scale", vec_to_json(model.standardizer.scale())}};
    doc["column_mask"] = model.column_mask;
    doc["full_dim"] = model.full_dim;
    doc["options"] = {{"knn_k", model.options.knn_k},
                      {"svm", svm_params_to_json(model.options.svm)},
                      {"logistic_tolerance", model.options.logistic_tolerance},
                      {"logistic_max_iters", model.options.logistic_max_iters},
                      {"covariance_ridge", model.options.covariance_ridge},
                      {"seed", model.options.seed}};

    json payload;
    if (const auto* knn = std::get_if<KnnPayload>(&model.payload)) {
        payload["k"] = knn->k;
        payload["points"] = mat_to_json(knn->points);
        payload["labels"] = knn->labels;
    } else if (const auto* lda = std::get_if<LdaPayload>(&model.payload)) {
        payload["means"] = mat_to_json(lda->means);
        payload["precision"] = mat_to_json(lda->precision);
        payload["log_priors"] = vec_to_json(lda->log_priors);
    } else if (const auto* qda = std::get_if<QdaPayload>(&model.payload)) {
        payload["means"] = mat_to_json(qda->means);
        json precisions = json::array();
        for (const auto& p : qda->precisions) precisions.push_back(mat_to_json(p));
        payload["precisions"] = std::move(precisions);
        payload["log_dets"] = vec_to_json(qda->log_dets);
        payload["log_priors"] = vec_to_json(qda->log_priors);
    } else if (const auto* logistic = std::get_if<LogisticPayload>(&model.payload)) {
        json pairs = json::array();
        for (const auto& pair : logistic->pairs) {
            pairs.push_back({{"first", pair.first},
                             {"second", pair.second},
                             {"weights", vec_to_json(pair.weights)},
                             {"bias", pair.bias}});
        }
        payload["pairs"] = std::move(pairs);
    } else {
        const auto& svm = std::get<SvmPayload>(model.payload);
        payload["params"] = svm_params_to_json(svm.params);
        json pairs = json::array();
        for (const auto& pair : svm.pairs) {
            pairs.push_back({{"first", pair.first},
                             {"second", pair.second},
                             {"support", mat_to_json(pair.support)},
                             {"coefficients", vec_to_json(pair.coefficients)},
                             {"bias", pair.bias}});
        }
        payload["pairs"] = std::move(pairs);
    }
    doc["payload"] = std::move(payload);

    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) fail(ErrorCode::IoFailure, "short write to " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::UnreadableModel, "cannot open " + path);
    json doc;
    try {
        in >> doc;
        if (doc.at("format_version").get<int>() != 1) {
            fail(ErrorCode::UnreadableModel, path + ": unsupported format version");
        }
        TrainedModel model;
        model.kind = model_kind_from_name(doc.at("kind").get<std::string>());
        model.classes = doc.at("classes").get<std::vector<std::string>>();
        model.standardizer = Standardizer(vec_from_json(doc.at("standardizer").at("mean")),
                                          vec_from_json(doc.at("standardizer").at("scale")));
        model.column_mask = doc.at("column_mask").get<std::vector<int>>();
        model.full_dim = doc.at("full_dim").get<int>();
        const json& options = doc.at("options");
        model.options.knn_k = options.at("knn_k").get<int>();
        model.options.svm = svm_params_from_json(options.at("svm"));
        model.options.logistic_tolerance = options.at("logistic_tolerance").get<double>();
        model.options.logistic_max_iters = options.at("logistic_max_iters").get<int>();
        model.options.covariance_ridge = options.at("covariance_ridge").get<double>();
        model.options.seed = options.at("seed").get<std::uint64_t>();

        const json& payload = doc.at("payload");
        switch (model.kind) {
            case ModelKind::Knn: {
                KnnPayload knn;
                knn.k = payload.at("k").get<int>();
                knn.points = mat_from_json(payload.at("points"));
                knn.labels = payload.at("labels").get<std::vector<int>>();
                model.payload = std::move(knn);
                break;
            }
            case ModelKind::Lda: {
                LdaPayload lda;
                lda.means = mat_from_json(payload.at("means"));
                lda.precision = mat_from_json(payload.at("precision"));
                lda.log_priors = vec_from_json(payload.at("log_priors"));
                model.payload = std::move(lda);
                break;
            }
            case ModelKind::Qda: {
                QdaPayload qda;
                qda.means = mat_from_json(payload.at("means"));
                for (const auto& p : payload.at("precisions")) {
                    qda.precisions.push_back(mat_from_json(p));
                }
                qda.log_dets = vec_from_json(payload.at("log_dets"));
                qda.log_priors = vec_from_json(payload.at("log_priors"));
                model.payload = std::move(qda);
                break;
            }
            case ModelKind::Logistic: {
                LogisticPayload logistic;
                for (const auto& p : payload.at("pairs")) {
                    LogisticPair pair;
                    pair.first = p.at("first").get<int>();
                    pair.second = p.at("second").get<int>();
                    pair.weights = vec_from_json(p.at("weights"));
                    pair.bias = p.at("bias").get<double>();
                    logistic.pairs.push_back(std::move(pair));
                }
                model.payload = std::move(logistic);
                break;
            }
            case ModelKind::Svm: {
                SvmPayload svm;
                svm.params = svm_params_from_json(payload.at("params"));
                for (const auto& p : payload.at("pairs")) {
                    SvmPair pair;
                    pair.first = p.at("first").get<int>();
                    pair.second = p.at("second").get<int>();
                    pair.support = mat_from_json(p.at("support"));
                    pair.coefficients = vec_from_json(p.at("coefficients"));
                    pair.bias = p.at("bias").get<double>();
                    svm.pairs.push_back(std::move(pair));
                }
                model.payload = std::move(svm);
                break;
            }
        }
        return model;
    } catch (const json::exception& e) {
        fail(ErrorCode::UnreadableModel, path + ": " + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnreadableModel) throw;
        fail(ErrorCode::UnreadableModel, path + ": " + e.what());
    }
}

}  // namespace bispeech
