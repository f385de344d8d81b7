// Random forest and extra trees: ensembles of unlimited-depth Gini
// trees over sqrt(d) feature subsets, predicting by plurality vote.
//
// Tree t derives its generator from (seed + t), so the forest is
// bit-identical whether trees train on one thread or many.
#pragma once

#include <cmath>
#include <vector>

#include "prosody/classify/decision_tree.hpp"
#include "prosody/parallel.hpp"

namespace prosody {

class ForestModel final : public Model {
  public:
    ForestModel(detail::FittedBase base, std::vector<TreeNodes> trees,
                bool extra_trees)
        : base_(std::move(base)),
          trees_(std::move(trees)),
          extra_trees_(extra_trees) {}

    Family family() const override {
        return extra_trees_ ? Family::ExtraTrees : Family::RandomForest;
    }
    int class_count() const override { return base_.class_count; }
    int feature_count() const override { return base_.feature_count; }
    std::uint64_t seed() const override { return base_.seed; }
    const detail::FittedBase& base() const { return base_; }
    const std::vector<TreeNodes>& trees() const { return trees_; }

    int predict(std::span<const double> x) const override {
        check_input(x);
        const std::vector<double> z = base_.standardizer.apply(x);
        std::vector<int> votes(base_.class_count, 0);
        for (const auto& tree : trees_)
            ++votes[static_cast<std::size_t>(std::lround(tree.traverse(z)))];
        int best = 0;
        for (int c = 1; c < base_.class_count; ++c)
            if (votes[c] > votes[best]) best = c;
        return best;
    }

  private:
    detail::FittedBase base_;
    std::vector<TreeNodes> trees_;
    bool extra_trees_;
};

namespace detail {

inline ModelPtr train_forest(const LabeledSet& data, int n_trees,
                             std::uint64_t seed, bool extra_trees, int threads) {
    data.validate();
    if (n_trees < 1)
        throw std::invalid_argument("train_forest: n_trees must be >= 1");

    FittedBase base;
    base.standardizer = Standardizer::fit(data.x);
    base.class_count = data.class_count;
    base.feature_count = static_cast<int>(data.dim());
    base.seed = seed;
    const Matrix x = base.standardizer.apply(data.x);

    const std::size_t n = data.size();
    const std::size_t features_per_node = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::sqrt(static_cast<double>(data.dim()))));

    std::vector<TreeNodes> trees(static_cast<std::size_t>(n_trees));
    parallel_for(trees.size(), threads, [&](std::size_t t) {
        Rng rng(seed + t);
        std::vector<std::size_t> samples(n);
        if (extra_trees) {
            // Extra trees use the full sample, no bootstrap.
            std::iota(samples.begin(), samples.end(), 0);
        } else {
            for (std::size_t i = 0; i < n; ++i) samples[i] = rng.uniform_int(n);
        }
        ClassificationTreeBuilder builder(
            x, data.y, data.class_count,
            extra_trees ? SplitMode::RandomThreshold : SplitMode::Best,
            features_per_node, rng);
        trees[t] = builder.build(std::move(samples));
    });
    return std::make_shared<ForestModel>(std::move(base), std::move(trees),
                                         extra_trees);
}

}  // namespace detail

inline ModelPtr train_random_forest(const LabeledSet& data, int n_trees,
                                    std::uint64_t seed = 0, int threads = 1) {
    return detail::train_forest(data, n_trees, seed, false, threads);
}

inline ModelPtr train_extra_trees(const LabeledSet& data, int n_trees,
                                  std::uint64_t seed = 0, int threads = 1) {
    return detail::train_forest(data, n_trees, seed, true, threads);
}

// Single CART on the full sample with all features; baseline for the
// ensemble sanity tests.
inline ModelPtr train_single_cart(const LabeledSet& data, std::uint64_t seed = 0) {
    data.validate();
    detail::FittedBase base;
    base.standardizer = Standardizer::fit(data.x);
    base.class_count = data.class_count;
    base.feature_count = static_cast<int>(data.dim());
    base.seed = seed;
    const Matrix x = base.standardizer.apply(data.x);
    std::vector<std::size_t> samples(data.size());
    std::iota(samples.begin(), samples.end(), 0);
    detail::ClassificationTreeBuilder builder(x, data.y, data.class_count,
                                              SplitMode::Best, data.dim(),
                                              Rng(seed));
    std::vector<TreeNodes> trees;
    trees.push_back(builder.build(std::move(samples)));
    return std::make_shared<ForestModel>(std::move(base), std::move(trees), false);
}

}  // namespace prosody
