// Linear SVM, one-vs-rest, trained by averaged stochastic subgradient
// descent on the L2-regularized hinge objective
//
//     F(w) = 1/2 ||w||^2 + c * sum_i max(0, 1 - y_i (w . x_i + b)).
//
// The bias rides as an appended constant-1 feature (and is therefore
// regularized with the rest of w). Internally the sweep runs in the
// equivalent scaling lambda = 1 / (c n) with the 1/(lambda t) step
// schedule; the returned weights are the tail average of the iterates.
#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "prosody/classify/common.hpp"
#include "prosody/rng.hpp"

namespace prosody {

class LinearSvmModel final : public Model {
  public:
    LinearSvmModel(detail::FittedBase base, Matrix weights, double c)
        : base_(std::move(base)), weights_(std::move(weights)), c_(c) {}

    Family family() const override { return Family::Svm; }
    int class_count() const override { return base_.class_count; }
    int feature_count() const override { return base_.feature_count; }
    std::uint64_t seed() const override { return base_.seed; }
    double c() const { return c_; }
    const detail::FittedBase& base() const { return base_; }
    const Matrix& weights() const { return weights_; }  // C x (d+1), bias last

    std::vector<double> scores(std::span<const double> x) const {
        check_input(x);
        const std::vector<double> z = base_.standardizer.apply(x);
        std::vector<double> out(base_.class_count, 0.0);
        for (int c = 0; c < base_.class_count; ++c) {
            const auto w = weights_.row(static_cast<std::size_t>(c));
            double acc = w[z.size()];  // bias
            for (std::size_t j = 0; j < z.size(); ++j) acc += w[j] * z[j];
            out[c] = acc;
        }
        return out;
    }

    int predict(std::span<const double> x) const override {
        const auto s = scores(x);
        return argmax_tie_low(s);
    }

  private:
    detail::FittedBase base_;
    Matrix weights_;
    double c_;
};

namespace detail {

// One binary OVR problem on pre-standardized, bias-augmented rows.
inline std::vector<double> train_svm_binary(const Matrix& x,
                                            const std::vector<int>& y,
                                            int positive_class, double c,
                                            int epochs, Rng rng) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();  // includes bias column
    const double lambda = 1.0 / (c * static_cast<double>(n));

    std::vector<double> w(d, 0.0), w_avg(d, 0.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    const std::size_t total_iters = static_cast<std::size_t>(epochs) * n;
    const std::size_t avg_start = total_iters / 2;  // tail averaging
    std::size_t averaged = 0;
    std::size_t t = 0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t idx : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const auto row = x.row(idx);
            const double label = y[idx] == positive_class ? 1.0 : -1.0;
            double margin = 0.0;
            for (std::size_t j = 0; j < d; ++j) margin += w[j] * row[j];
            margin *= label;

            const double decay = 1.0 - eta * lambda;
            if (margin < 1.0) {
                for (std::size_t j = 0; j < d; ++j)
                    w[j] = decay * w[j] + eta * label * row[j];
            } else {
                for (std::size_t j = 0; j < d; ++j) w[j] *= decay;
            }
            if (t > avg_start) {
                ++averaged;
                for (std::size_t j = 0; j < d; ++j) w_avg[j] += w[j];
            }
        }
    }
    if (averaged > 0)
        for (std::size_t j = 0; j < d; ++j) w_avg[j] /= static_cast<double>(averaged);
    else
        w_avg = w;
    return w_avg;
}

}  // namespace detail

inline ModelPtr train_linear_svm(const LabeledSet& data, double c,
                                 std::uint64_t seed = 0, int epochs = 100) {
    data.validate();
    if (c <= 0.0) throw std::invalid_argument("train_linear_svm: c must be > 0");
    std::vector<int> present(data.class_count, 0);
    for (int label : data.y) present[label] = 1;
    if (std::accumulate(present.begin(), present.end(), 0) < 2)
        throw std::invalid_argument(
            "train_linear_svm: need at least 2 classes present");

    detail::FittedBase base;
    base.standardizer = Standardizer::fit(data.x);
    base.class_count = data.class_count;
    base.feature_count = static_cast<int>(data.dim());
    base.seed = seed;

    // Standardize and append the constant bias column.
    Matrix aug(data.size(), data.dim() + 1);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto z = base.standardizer.apply(data.x.row(i));
        for (std::size_t j = 0; j < z.size(); ++j) aug.at(i, j) = z[j];
        aug.at(i, data.dim()) = 1.0;
    }

    Matrix weights(static_cast<std::size_t>(data.class_count), data.dim() + 1);
    for (int cls = 0; cls < data.class_count; ++cls) {
        const auto w = detail::train_svm_binary(aug, data.y, cls, c, epochs,
                                                Rng(seed + static_cast<std::uint64_t>(cls)));
        for (std::size_t j = 0; j < w.size(); ++j)
            weights.at(static_cast<std::size_t>(cls), j) = w[j];
    }
    return std::make_shared<LinearSvmModel>(std::move(base), std::move(weights), c);
}

// Exact value of the per-class objective, used by convergence tests.
inline double svm_binary_objective(const LabeledSet& data, const Model& model,
                                   int positive_class, double c) {
    const auto* svm = dynamic_cast<const LinearSvmModel*>(&model);
    if (!svm) throw std::invalid_argument("svm_binary_objective: not an SVM model");
    const auto w = svm->weights().row(static_cast<std::size_t>(positive_class));
    double reg = 0.0;
    for (double v : w) reg += v * v;
    double hinge = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto z = svm->base().standardizer.apply(data.x.row(i));
        double score = w[z.size()];
        for (std::size_t j = 0; j < z.size(); ++j) score += w[j] * z[j];
        const double label = data.y[i] == positive_class ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - label * score);
    }
    return 0.5 * reg + c * hinge;
}

}  // namespace prosody
