// CART decision trees: Gini classification trees with either exact best
// splits (random forest) or uniformly random thresholds (extra trees),
// and exact-split variance-reduction regression trees (gradient
// boosting).
//
// All tie-breaking is "first wins" with candidate features in ascending
// index order and thresholds in ascending value order, so a tree is a
// deterministic function of (data, parameters, rng stream).
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "prosody/classify/common.hpp"
#include "prosody/rng.hpp"

namespace prosody {

// Flat node storage; leaves have feature == -1.
struct TreeNodes {
    std::vector<int> feature;
    std::vector<double> threshold;   // go left when x[feature] <= threshold
    std::vector<int> left;
    std::vector<int> right;
    std::vector<double> value;       // leaf payload: label code or regression value

    int add_leaf(double v) {
        feature.push_back(-1);
        threshold.push_back(0.0);
        left.push_back(-1);
        right.push_back(-1);
        value.push_back(v);
        return static_cast<int>(feature.size()) - 1;
    }

    int add_split(int f, double thr) {
        feature.push_back(f);
        threshold.push_back(thr);
        left.push_back(-1);
        right.push_back(-1);
        value.push_back(0.0);
        return static_cast<int>(feature.size()) - 1;
    }

    double traverse(std::span<const double> x) const {
        int node = 0;
        while (feature[node] >= 0)
            node = x[static_cast<std::size_t>(feature[node])] <= threshold[node]
                       ? left[node]
                       : right[node];
        return value[node];
    }

    std::size_t size() const { return feature.size(); }
};

enum class SplitMode { Best, RandomThreshold };

namespace detail {

inline double gini(std::span<const std::size_t> counts, std::size_t total) {
    if (total == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        acc += p * p;
    }
    return 1.0 - acc;
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();  // lower is better
};

// Draws `m` distinct feature indices in ascending order.
inline std::vector<int> sample_features(std::size_t d, std::size_t m, Rng& rng) {
    std::vector<int> all(d);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + rng.uniform_int(d - i);
        std::swap(all[i], all[j]);
    }
    all.resize(m);
    std::sort(all.begin(), all.end());
    return all;
}

class ClassificationTreeBuilder {
  public:
    ClassificationTreeBuilder(const Matrix& x, const std::vector<int>& y,
                              int class_count, SplitMode mode,
                              std::size_t features_per_node, Rng rng)
        : x_(x),
          y_(y),
          class_count_(class_count),
          mode_(mode),
          features_per_node_(features_per_node),
          rng_(rng) {}

    TreeNodes build(std::vector<std::size_t> samples) {
        nodes_ = TreeNodes{};
        grow(std::move(samples));
        return std::move(nodes_);
    }

  private:
    int grow(std::vector<std::size_t> samples) {
        std::vector<std::size_t> counts(class_count_, 0);
        for (std::size_t i : samples) ++counts[static_cast<std::size_t>(y_[i])];
        const int majority = majority_label(counts);
        const bool pure =
            counts[static_cast<std::size_t>(majority)] == samples.size();
        if (pure || samples.size() < 2) return nodes_.add_leaf(majority);

        const SplitChoice choice = pick_split(samples);
        if (choice.feature < 0) return nodes_.add_leaf(majority);

        std::vector<std::size_t> left, right;
        for (std::size_t i : samples) {
            (x_.at(i, static_cast<std::size_t>(choice.feature)) <= choice.threshold
                 ? left
                 : right)
                .push_back(i);
        }
        if (left.empty() || right.empty()) return nodes_.add_leaf(majority);

        const int node = nodes_.add_split(choice.feature, choice.threshold);
        const int l = grow(std::move(left));
        nodes_.left[node] = l;
        const int r = grow(std::move(right));
        nodes_.right[node] = r;
        return node;
    }

    int majority_label(std::span<const std::size_t> counts) const {
        int best = 0;
        for (int c = 1; c < class_count_; ++c)
            if (counts[static_cast<std::size_t>(c)] >
                counts[static_cast<std::size_t>(best)])
                best = c;
        return best;
    }

    SplitChoice pick_split(const std::vector<std::size_t>& samples) {
        const auto features =
            sample_features(x_.cols(), features_per_node_, rng_);
        SplitChoice best;
        for (int f : features) {
            if (mode_ == SplitMode::Best)
                best_threshold(samples, f, best);
            else
                random_threshold(samples, f, best);
        }
        return best;
    }

    // Exact search: sort node values on feature f, evaluate the midpoint
    // between each pair of distinct neighbors via prefix class counts.
    void best_threshold(const std::vector<std::size_t>& samples, int f,
                        SplitChoice& best) {
        const std::size_t n = samples.size();
        sorted_.assign(samples.begin(), samples.end());
        std::sort(sorted_.begin(), sorted_.end(), [&](std::size_t a, std::size_t b) {
            const double va = x_.at(a, static_cast<std::size_t>(f));
            const double vb = x_.at(b, static_cast<std::size_t>(f));
            return va < vb || (va == vb && a < b);
        });

        std::vector<std::size_t> left_counts(class_count_, 0);
        std::vector<std::size_t> right_counts(class_count_, 0);
        for (std::size_t i : samples) ++right_counts[static_cast<std::size_t>(y_[i])];

        for (std::size_t i = 0; i + 1 < n; ++i) {
            const std::size_t idx = sorted_[i];
            ++left_counts[static_cast<std::size_t>(y_[idx])];
            --right_counts[static_cast<std::size_t>(y_[idx])];
            const double v = x_.at(idx, static_cast<std::size_t>(f));
            const double v_next = x_.at(sorted_[i + 1], static_cast<std::size_t>(f));
            if (v == v_next) continue;
            const std::size_t nl = i + 1, nr = n - nl;
            const double score =
                (static_cast<double>(nl) * gini(left_counts, nl) +
                 static_cast<double>(nr) * gini(right_counts, nr)) /
                static_cast<double>(n);
            if (score < best.score) {
                best.score = score;
                best.feature = f;
                best.threshold = v + 0.5 * (v_next - v);
            }
        }
    }

    // Extra-trees rule: a single uniformly random threshold per feature.
    void random_threshold(const std::vector<std::size_t>& samples, int f,
                          SplitChoice& best) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i : samples) {
            const double v = x_.at(i, static_cast<std::size_t>(f));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (!(hi > lo)) return;  // constant feature at this node
        const double thr = rng_.uniform(lo, hi);

        std::vector<std::size_t> left_counts(class_count_, 0);
        std::vector<std::size_t> right_counts(class_count_, 0);
        std::size_t nl = 0;
        for (std::size_t i : samples) {
            if (x_.at(i, static_cast<std::size_t>(f)) <= thr) {
                ++left_counts[static_cast<std::size_t>(y_[i])];
                ++nl;
            } else {
                ++right_counts[static_cast<std::size_t>(y_[i])];
            }
        }
        const std::size_t n = samples.size(), nr = n - nl;
        if (nl == 0 || nr == 0) return;
        const double score = (static_cast<double>(nl) * gini(left_counts, nl) +
                              static_cast<double>(nr) * gini(right_counts, nr)) /
                             static_cast<double>(n);
        if (score < best.score) {
            best.score = score;
            best.feature = f;
            best.threshold = thr;
        }
    }

    const Matrix& x_;
    const std::vector<int>& y_;
    int class_count_;
    SplitMode mode_;
    std::size_t features_per_node_;
    Rng rng_;
    TreeNodes nodes_;
    std::vector<std::size_t> sorted_;
};

// Depth-limited regression tree minimizing squared error, exact splits
// over all features. Leaf values are set by the caller through
// `leaf_assign` (boosting substitutes Newton steps for plain means).
class RegressionTreeBuilder {
  public:
    RegressionTreeBuilder(const Matrix& x, const std::vector<double>& target,
                          int max_depth)
        : x_(x), target_(target), max_depth_(max_depth) {}

    template <typename LeafValueFn>
    TreeNodes build(const std::vector<std::size_t>& samples,
                    LeafValueFn&& leaf_value) {
        nodes_ = TreeNodes{};
        grow(samples, 0, leaf_value);
        return std::move(nodes_);
    }

  private:
    template <typename LeafValueFn>
    int grow(const std::vector<std::size_t>& samples, int depth,
             LeafValueFn& leaf_value) {
        if (depth >= max_depth_ || samples.size() < 2)
            return nodes_.add_leaf(leaf_value(samples));

        const SplitChoice choice = pick_split(samples);
        if (choice.feature < 0) return nodes_.add_leaf(leaf_value(samples));

        std::vector<std::size_t> left, right;
        for (std::size_t i : samples) {
            (x_.at(i, static_cast<std::size_t>(choice.feature)) <= choice.threshold
                 ? left
                 : right)
                .push_back(i);
        }
        if (left.empty() || right.empty())
            return nodes_.add_leaf(leaf_value(samples));

        const int node = nodes_.add_split(choice.feature, choice.threshold);
        const int l = grow(left, depth + 1, leaf_value);
        nodes_.left[node] = l;
        const int r = grow(right, depth + 1, leaf_value);
        nodes_.right[node] = r;
        return node;
    }

    SplitChoice pick_split(const std::vector<std::size_t>& samples) {
        SplitChoice best;
        const std::size_t n = samples.size();
        for (std::size_t f = 0; f < x_.cols(); ++f) {
            sorted_.assign(samples.begin(), samples.end());
            std::sort(sorted_.begin(), sorted_.end(),
                      [&](std::size_t a, std::size_t b) {
                          const double va = x_.at(a, f);
                          const double vb = x_.at(b, f);
                          return va < vb || (va == vb && a < b);
                      });
            double sum_left = 0.0, sum_right = 0.0;
            for (std::size_t i : samples) sum_right += target_[i];
            // Minimizing child SSE == maximizing sum_l^2/n_l + sum_r^2/n_r.
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const std::size_t idx = sorted_[i];
                sum_left += target_[idx];
                sum_right -= target_[idx];
                const double v = x_.at(idx, f);
                const double v_next = x_.at(sorted_[i + 1], f);
                if (v == v_next) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = static_cast<double>(n - i - 1);
                const double gain =
                    sum_left * sum_left / nl + sum_right * sum_right / nr;
                if (-gain < best.score) {
                    best.score = -gain;
                    best.feature = static_cast<int>(f);
                    best.threshold = v + 0.5 * (v_next - v);
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    const std::vector<double>& target_;
    int max_depth_;
    TreeNodes nodes_;
    std::vector<std::size_t> sorted_;
};

}  // namespace detail

}  // namespace prosody
