// k-nearest-neighbor classifier over standardized Euclidean distance.
//
// Tie-breaking is fully specified so predictions are deterministic:
// neighbors order by (distance, training index); vote ties break by
// smaller summed neighbor distance, then by lower label code.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "prosody/classify/common.hpp"

namespace prosody {

class KnnModel final : public Model {
  public:
    KnnModel(detail::FittedBase base, Matrix train_x, std::vector<int> train_y,
             int k)
        : base_(std::move(base)),
          train_x_(std::move(train_x)),
          train_y_(std::move(train_y)),
          k_(k) {}

    Family family() const override { return Family::Knn; }
    int class_count() const override { return base_.class_count; }
    int feature_count() const override { return base_.feature_count; }
    std::uint64_t seed() const override { return base_.seed; }
    int k() const { return k_; }
    const detail::FittedBase& base() const { return base_; }
    const Matrix& train_x() const { return train_x_; }
    const std::vector<int>& train_y() const { return train_y_; }

    int predict(std::span<const double> x) const override {
        check_input(x);
        const std::vector<double> q = base_.standardizer.apply(x);
        const std::size_t n = train_x_.rows();
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = train_x_.row(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < q.size(); ++j) {
                const double d = q[j] - row[j];
                acc += d * d;
            }
            dist[i] = {acc, i};
        }
        const std::size_t k = static_cast<std::size_t>(k_);
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

        std::vector<int> votes(base_.class_count, 0);
        std::vector<double> summed(base_.class_count, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            const int label = train_y_[dist[i].second];
            votes[label] += 1;
            summed[label] += std::sqrt(dist[i].first);
        }
        int best = -1;
        for (int c = 0; c < base_.class_count; ++c) {
            if (votes[c] == 0) continue;
            if (best < 0 || votes[c] > votes[best] ||
                (votes[c] == votes[best] && summed[c] < summed[best]))
                best = c;
        }
        return best;
    }

  private:
    detail::FittedBase base_;
    Matrix train_x_;  // standardized
    std::vector<int> train_y_;
    int k_;
};

inline ModelPtr train_knn(const LabeledSet& data, int k, std::uint64_t seed = 0) {
    data.validate();
    if (k < 1 || static_cast<std::size_t>(k) > data.size())
        throw std::invalid_argument(strfmt("train_knn: k=%d outside [1, %zu]", k,
                                           data.size()));
    detail::FittedBase base;
    base.standardizer = Standardizer::fit(data.x);
    base.class_count = data.class_count;
    base.feature_count = static_cast<int>(data.dim());
    base.seed = seed;
    Matrix standardized = base.standardizer.apply(data.x);
    return std::make_shared<KnnModel>(std::move(base), std::move(standardized),
                                      data.y, k);
}

}  // namespace prosody
