// Gradient boosting: one-vs-rest binary logistic boosting with depth-3
// regression trees fit to the negative log-loss gradient (residual
// y - p), Newton leaf values, learning rate 0.1, scores initialized at
// the class log-odds. Prediction is the argmax of per-class scores.
//
// Training uses exact splits and no subsampling, so it is deterministic
// with no random state at all.
#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "prosody/classify/decision_tree.hpp"

namespace prosody {

class GradientBoostingModel final : public Model {
  public:
    GradientBoostingModel(detail::FittedBase base,
                          std::vector<double> init_scores,
                          std::vector<std::vector<TreeNodes>> stages,
                          double learning_rate,
                          std::vector<double> loss_history)
        : base_(std::move(base)),
          init_scores_(std::move(init_scores)),
          stages_(std::move(stages)),
          learning_rate_(learning_rate),
          loss_history_(std::move(loss_history)) {}

    Family family() const override { return Family::GradientBoosting; }
    int class_count() const override { return base_.class_count; }
    int feature_count() const override { return base_.feature_count; }
    std::uint64_t seed() const override { return base_.seed; }
    const detail::FittedBase& base() const { return base_; }
    double learning_rate() const { return learning_rate_; }
    const std::vector<double>& init_scores() const { return init_scores_; }
    const std::vector<std::vector<TreeNodes>>& stages() const { return stages_; }

    // Mean training log-loss (summed over the OVR problems) after each
    // stage; loss_history()[0] is the priors-only loss.
    const std::vector<double>& loss_history() const { return loss_history_; }

    std::vector<double> scores(std::span<const double> x) const {
        check_input(x);
        const std::vector<double> z = base_.standardizer.apply(x);
        std::vector<double> out(init_scores_);
        for (int c = 0; c < base_.class_count; ++c)
            for (const auto& tree : stages_[static_cast<std::size_t>(c)])
                out[static_cast<std::size_t>(c)] +=
                    learning_rate_ * tree.traverse(z);
        return out;
    }

    int predict(std::span<const double> x) const override {
        const auto s = scores(x);
        return argmax_tie_low(s);
    }

  private:
    detail::FittedBase base_;
    std::vector<double> init_scores_;
    std::vector<std::vector<TreeNodes>> stages_;  // class -> stage trees
    double learning_rate_;
    std::vector<double> loss_history_;
};

inline ModelPtr train_gradient_boosting(const LabeledSet& data, int n_stages,
                                        std::uint64_t seed = 0,
                                        double learning_rate = 0.1,
                                        int max_depth = 3) {
    data.validate();
    if (n_stages < 0)
        throw std::invalid_argument("train_gradient_boosting: n_stages < 0");

    detail::FittedBase base;
    base.standardizer = Standardizer::fit(data.x);
    base.class_count = data.class_count;
    base.feature_count = static_cast<int>(data.dim());
    base.seed = seed;
    const Matrix x = base.standardizer.apply(data.x);

    const std::size_t n = data.size();
    const int classes = data.class_count;
    constexpr double kProbEps = 1e-12;

    // Per-class binary targets and running scores, initialized at the
    // class log-odds (clamped away from degenerate priors).
    std::vector<double> init_scores(static_cast<std::size_t>(classes));
    Matrix targets(static_cast<std::size_t>(classes), n);
    Matrix scores(static_cast<std::size_t>(classes), n);
    for (int c = 0; c < classes; ++c) {
        std::size_t positives = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = data.y[i] == c ? 1.0 : 0.0;
            targets.at(static_cast<std::size_t>(c), i) = t;
            positives += data.y[i] == c;
        }
        double prior = static_cast<double>(positives) / static_cast<double>(n);
        prior = std::min(1.0 - kProbEps, std::max(kProbEps, prior));
        init_scores[static_cast<std::size_t>(c)] = std::log(prior / (1.0 - prior));
        for (std::size_t i = 0; i < n; ++i)
            scores.at(static_cast<std::size_t>(c), i) =
                init_scores[static_cast<std::size_t>(c)];
    }

    auto total_loss = [&] {
        double loss = 0.0;
        for (int c = 0; c < classes; ++c)
            for (std::size_t i = 0; i < n; ++i) {
                const double f = scores.at(static_cast<std::size_t>(c), i);
                const double t = targets.at(static_cast<std::size_t>(c), i);
                // log(1 + e^-yf) written stably via softplus.
                const double yf = (2.0 * t - 1.0) * f;
                loss += yf > 0.0 ? std::log1p(std::exp(-yf))
                                 : -yf + std::log1p(std::exp(yf));
            }
        return loss / static_cast<double>(n);
    };

    std::vector<std::vector<TreeNodes>> stages(static_cast<std::size_t>(classes));
    std::vector<double> loss_history;
    loss_history.reserve(static_cast<std::size_t>(n_stages) + 1);
    loss_history.push_back(total_loss());

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::vector<double> residual(n), prob(n);

    for (int stage = 0; stage < n_stages; ++stage) {
        for (int c = 0; c < classes; ++c) {
            const std::size_t cc = static_cast<std::size_t>(c);
            for (std::size_t i = 0; i < n; ++i) {
                prob[i] = 1.0 / (1.0 + std::exp(-scores.at(cc, i)));
                residual[i] = targets.at(cc, i) - prob[i];
            }
            detail::RegressionTreeBuilder builder(x, residual, max_depth);
            // Newton step per leaf: sum(residual) / sum(p (1 - p)).
            TreeNodes tree =
                builder.build(all, [&](const std::vector<std::size_t>& leaf) {
                    double num = 0.0, den = 0.0;
                    for (std::size_t i : leaf) {
                        num += residual[i];
                        den += prob[i] * (1.0 - prob[i]);
                    }
                    return den > kProbEps ? num / den : 0.0;
                });
            for (std::size_t i = 0; i < n; ++i)
                scores.at(cc, i) += learning_rate * tree.traverse(x.row(i));
            stages[cc].push_back(std::move(tree));
        }
        loss_history.push_back(total_loss());
    }

    return std::make_shared<GradientBoostingModel>(
        std::move(base), std::move(init_scores), std::move(stages),
        learning_rate, std::move(loss_history));
}

}  // namespace prosody
