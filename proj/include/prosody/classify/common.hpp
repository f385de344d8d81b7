// Shared classifier machinery: the training-set container, per-feature
// z-score standardization (fitted on training data only and stored
// inside every model), and the uniform train/predict contract all six
// families implement.
#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "prosody/common.hpp"

namespace prosody {

struct LabeledSet {
    Matrix x;             // n x d
    std::vector<int> y;   // n labels in [0, class_count)
    int class_count = 0;

    std::size_t size() const { return x.rows(); }
    std::size_t dim() const { return x.cols(); }

    void validate() const {
        if (x.rows() != y.size())
            throw std::invalid_argument("labeled set: row/label count mismatch");
        if (class_count < 2)
            throw std::invalid_argument("labeled set: need at least 2 classes");
        if (size() < static_cast<std::size_t>(class_count))
            throw std::invalid_argument("labeled set: fewer samples than classes");
        for (int label : y)
            if (label < 0 || label >= class_count)
                throw std::invalid_argument("labeled set: label out of range");
        for (double v : x.data())
            if (!std::isfinite(v))
                throw std::invalid_argument("labeled set: non-finite feature");
    }

    // Column-gather copy, used by feature selection to train on subsets.
    LabeledSet select_features(std::span<const int> feature_indices) const {
        LabeledSet out;
        out.class_count = class_count;
        out.y = y;
        out.x = Matrix(x.rows(), feature_indices.size());
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t j = 0; j < feature_indices.size(); ++j)
                out.x.at(i, j) = x.at(i, static_cast<std::size_t>(feature_indices[j]));
        return out;
    }
};

// Per-feature z-scoring. Constant features keep scale 1 so they pass
// through unchanged instead of dividing by zero.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Matrix& x) {
        Standardizer s;
        const std::size_t n = x.rows(), d = x.cols();
        s.mean.assign(d, 0.0);
        s.scale.assign(d, 1.0);
        if (n == 0) return s;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) s.mean[j] += x.at(i, j);
        for (std::size_t j = 0; j < d; ++j) s.mean[j] /= static_cast<double>(n);
        std::vector<double> var(d, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = x.at(i, j) - s.mean[j];
                var[j] += diff * diff;
            }
        for (std::size_t j = 0; j < d; ++j) {
            const double sd = std::sqrt(var[j] / static_cast<double>(n));
            s.scale[j] = sd > 0.0 ? sd : 1.0;
        }
        return s;
    }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> out(x.size());
        for (std::size_t j = 0; j < x.size(); ++j)
            out[j] = (x[j] - mean[j]) / scale[j];
        return out;
    }

    Matrix apply(const Matrix& x) const {
        Matrix out(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t j = 0; j < x.cols(); ++j)
                out.at(i, j) = (x.at(i, j) - mean[j]) / scale[j];
        return out;
    }
};

enum class Family { Knn, Svm, RandomForest, ExtraTrees, GradientBoosting, Ffnn };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Knn: return "knn";
        case Family::Svm: return "svm";
        case Family::RandomForest: return "random_forest";
        case Family::ExtraTrees: return "extra_trees";
        case Family::GradientBoosting: return "gradient_boosting";
        case Family::Ffnn: return "ffnn";
    }
    return "?";
}

inline Family parse_family(std::string_view text) {
    const std::string t = to_lower(trim(text));
    if (t == "knn") return Family::Knn;
    if (t == "svm") return Family::Svm;
    if (t == "random_forest" || t == "rf") return Family::RandomForest;
    if (t == "extra_trees" || t == "et") return Family::ExtraTrees;
    if (t == "gradient_boosting" || t == "gbm" || t == "gb")
        return Family::GradientBoosting;
    if (t == "ffnn" || t == "nn") return Family::Ffnn;
    throw DataError("unknown model family '" + std::string(text) +
                    "'; expected knn|svm|random_forest|extra_trees|"
                    "gradient_boosting|ffnn");
}

// Per-family hyperparameters and training constants. Each family is
// swept over exactly one of these; the rest stay at their defaults.
struct Hyperparams {
    int knn_k = 5;
    double svm_c = 1.0;
    int n_trees = 100;
    int n_boost_stages = 100;

    int svm_epochs = 100;
    int gbm_depth = 3;
    double gbm_learning_rate = 0.1;
    int ffnn_hidden = 136;
    int ffnn_epochs = 5;
    int ffnn_batch = 32;
    double ffnn_learning_rate = 1e-3;
};

// A fitted classifier of any family. Prediction is a pure function of
// (model, input); the stored standardizer is applied before the family
// rule. Immutable after training and safe for concurrent prediction.
class Model {
  public:
    virtual ~Model() = default;

    virtual Family family() const = 0;
    virtual int class_count() const = 0;
    virtual int feature_count() const = 0;
    virtual std::uint64_t seed() const = 0;
    virtual int predict(std::span<const double> x) const = 0;

    void check_input(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != feature_count())
            throw std::invalid_argument(strfmt(
                "predict: expected %d features, got %zu", feature_count(),
                x.size()));
        for (double v : x)
            if (!std::isfinite(v))
                throw std::invalid_argument("predict: non-finite input");
    }
};

using ModelPtr = std::shared_ptr<const Model>;

namespace detail {

// Common fitted state every family carries.
struct FittedBase {
    Standardizer standardizer;
    int class_count = 0;
    int feature_count = 0;
    std::uint64_t seed = 0;
};

}  // namespace detail

}  // namespace prosody
