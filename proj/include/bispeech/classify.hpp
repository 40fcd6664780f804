#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bispeech {

// Column-wise z-scoring fitted on training data. Columns whose std falls
// below 1e-12 pass through unchanged (mean 0, scale 1).
class Standardizer {
  public:
    Standardizer() = default;

    static Standardizer fit(const Eigen::MatrixXd& rows);

    Eigen::VectorXd transform(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd transform(const Eigen::MatrixXd& rows) const;
    Eigen::VectorXd inverse_transform(const Eigen::VectorXd& z) const;

    int dim() const { return static_cast<int>(mean_.size()); }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::VectorXd& scale() const { return scale_; }

    Standardizer(Eigen::VectorXd mean, Eigen::VectorXd scale)
        : mean_(std::move(mean)), scale_(std::move(scale)) {}

  private:
    Eigen::VectorXd mean_;
    Eigen::VectorXd scale_;
};

struct SvmParams {
    enum class Kernel { Linear, Polynomial };
    Kernel kernel = Kernel::Polynomial;
    int degree = 2;            // degree 2 is the quadratic kernel
    double kernel_scale = 1.0;
    double box_constraint = 1.0;
    double tolerance = 1e-3;
    int max_passes = 200;      // cap on full SMO sweeps
};

// Linear: (x.y)/scale^2; Polynomial: (1 + (x.y)/scale^2)^degree.
double kernel_value(const SvmParams& params, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

enum class ModelKind { Knn, Lda, Qda, Logistic, Svm };

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct TrainOptions {
    int knn_k = 10;
    SvmParams svm;
    double logistic_tolerance = 1e-6;  // stop when gradient norm drops below
    int logistic_max_iters = 5000;
    double covariance_ridge = 1e-6;    // lambda*I added to LDA/QDA covariances
    std::uint64_t seed = 0;
};

// ----- fitted payloads -----

struct KnnPayload {
    int k = 10;
    Eigen::MatrixXd points;       // standardized training rows
    std::vector<int> labels;      // class indices
};

struct LdaPayload {
    Eigen::MatrixXd means;        // classes x dim
    Eigen::MatrixXd precision;    // inverse pooled covariance
    Eigen::VectorXd log_priors;
};

struct QdaPayload {
    Eigen::MatrixXd means;
    std::vector<Eigen::MatrixXd> precisions;
    Eigen::VectorXd log_dets;
    Eigen::VectorXd log_priors;
};

// One binary classifier inside a one-vs-one reduction; class `first` takes
// the negative side, class `second` the positive side.
struct LogisticPair {
    int first = 0;
    int second = 1;
    Eigen::VectorXd weights;
    double bias = 0.0;
};

struct LogisticPayload {
    std::vector<LogisticPair> pairs;
};

struct SvmPair {
    int first = 0;
    int second = 1;
    Eigen::MatrixXd support;      // support vectors, one per row
    Eigen::VectorXd coefficients; // alpha_i * y_i per support vector
    double bias = 0.0;
};

struct SvmPayload {
    SvmParams params;
    std::vector<SvmPair> pairs;
};

struct TrainedModel {
    ModelKind kind = ModelKind::Knn;
    std::vector<std::string> classes;   // sorted; score/predict order
    Standardizer standardizer;
    std::vector<int> column_mask;       // indices into the full-width vector; empty = exact-dim only
    int full_dim = 0;                   // width the mask indexes into
    TrainOptions options;
    std::variant<KnnPayload, LdaPayload, QdaPayload, LogisticPayload, SvmPayload> payload;
};

// Fits the standardizer on `features`, then the requested model on the
// standardized rows. Labels must cover at least two classes.
TrainedModel train(ModelKind kind, const Eigen::MatrixXd& features,
                   const std::vector<std::string>& labels, const TrainOptions& options = {});

// Per-class scores aligned with model.classes: posterior probabilities for
// Lda/Qda/Logistic (sum to 1), accumulated signed margins for Svm,
// inverse-distance weights for Knn. Ties break toward the earlier class.
Eigen::VectorXd predict_score(const TrainedModel& model, const Eigen::VectorXd& x);
std::string predict(const TrainedModel& model, const Eigen::VectorXd& x);

void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

// Mean cross-entropy and its gradient for binary logistic regression with
// augmented weights (bias last). Exposed so the gradient can be checked
// against finite differences.
std::pair<double, Eigen::VectorXd> logistic_loss_and_gradient(const Eigen::VectorXd& weights_aug,
                                                              const Eigen::MatrixXd& rows,
                                                              const Eigen::VectorXd& targets);

}  // namespace bispeech
