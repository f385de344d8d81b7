// Additive (greedy forward) feature selection with the feed-forward
// network as probe model. Each round trains one probe per remaining
// candidate on (permanent set + candidate) and keeps the candidate with
// the highest validation macro-F1; a full run over n features trains
// n (n + 1) / 2 models.
//
// Per-model seeds derive as seed + round * n + candidate, so the outcome
// does not depend on scheduling or thread count.
#pragma once

#include <cstdint>
#include <vector>

#include "prosody/classify/network.hpp"
#include "prosody/evaluation.hpp"

namespace prosody {

struct SelectionTrace {
    std::vector<int> ranking;      // feature indices in selection order
    std::vector<double> f1_curve;  // validation macro-F1 (percent) per addition
    std::size_t models_trained = 0;
    std::uint64_t seed = 0;
};

// Runs the greedy loop until all features are ranked (or max_features
// when positive). Candidates within a round evaluate in parallel;
// rounds are sequential.
inline SelectionTrace additive_selection(const LabeledSet& train,
                                         const LabeledSet& val,
                                         const FfnnConfig& probe,
                                         std::uint64_t seed,
                                         int max_features = 0,
                                         int threads = 1) {
    train.validate();
    const std::size_t n = train.dim();
    if (n == 0 || val.dim() != n)
        throw std::invalid_argument("additive_selection: bad feature dims");
    const std::size_t rounds =
        max_features > 0 ? std::min<std::size_t>(n, static_cast<std::size_t>(
                                                        max_features))
                         : n;

    SelectionTrace trace;
    trace.seed = seed;
    std::vector<int> permanent;
    std::vector<char> used(n, 0);

    for (std::size_t round = 0; round < rounds; ++round) {
        std::vector<int> candidates;
        for (std::size_t f = 0; f < n; ++f)
            if (!used[f]) candidates.push_back(static_cast<int>(f));

        std::vector<double> f1(candidates.size(), 0.0);
        parallel_for(candidates.size(), threads, [&](std::size_t i) {
            std::vector<int> subset = permanent;
            subset.push_back(candidates[i]);
            const LabeledSet sub_train = train.select_features(subset);
            const LabeledSet sub_val = val.select_features(subset);
            const std::uint64_t model_seed =
                seed + round * n + static_cast<std::size_t>(candidates[i]);
            const ModelPtr model = train_ffnn(sub_train, probe, model_seed);
            f1[i] = evaluate(*model, sub_val).macro_f1;
        });
        trace.models_trained += candidates.size();

        std::size_t best = 0;
        for (std::size_t i = 1; i < candidates.size(); ++i)
            if (f1[i] > f1[best]) best = i;  // tie keeps the lower index

        permanent.push_back(candidates[best]);
        used[static_cast<std::size_t>(candidates[best])] = 1;
        trace.ranking.push_back(candidates[best]);
        trace.f1_curve.push_back(f1[best]);
    }
    return trace;
}

// Exhaustive single-feature evaluation; independent bookkeeping check
// for the first selection round.
inline int best_single_feature(const LabeledSet& train, const LabeledSet& val,
                               const FfnnConfig& probe, std::uint64_t seed,
                               int threads = 1) {
    const std::size_t n = train.dim();
    std::vector<double> f1(n, 0.0);
    parallel_for(n, threads, [&](std::size_t f) {
        const int idx[1] = {static_cast<int>(f)};
        const ModelPtr model =
            train_ffnn(train.select_features(idx), probe, seed + f);
        f1[f] = evaluate(*model, val.select_features(idx)).macro_f1;
    });
    std::size_t best = 0;
    for (std::size_t f = 1; f < n; ++f)
        if (f1[f] > f1[best]) best = f;
    return static_cast<int>(best);
}

}  // namespace prosody
