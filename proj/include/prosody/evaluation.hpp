// Evaluation protocol: stratified train/val/test splits, accuracy and
// macro-F1 metrics over a confusion matrix, per-family hyperparameter
// sweeps (validation macro-F1 selects, train+val refit scores once on
// test) and the taxonomy tasks (20 emotions, Big-4 quadrants, emotion
// pairs, per-singer holdout).
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "prosody/aggregation.hpp"
#include "prosody/classify/model_io.hpp"
#include "prosody/parallel.hpp"
#include "prosody/rng.hpp"

namespace prosody {

using FeatureDataset = std::vector<ClipFeatures>;

// ---------------------------------------------------------------------------
// Taxonomy tasks

struct TaxonomyMode {
    enum class Kind { Emotions20, Big4, Pair };
    Kind kind = Kind::Emotions20;
    Emotion pair_a = Emotion::Anger;
    Emotion pair_b = Emotion::Joy;

    static TaxonomyMode parse(const std::string& text) {
        TaxonomyMode mode;
        const std::string t = to_lower(trim(text));
        if (t == "emotions20") {
            mode.kind = Kind::Emotions20;
        } else if (t == "big4") {
            mode.kind = Kind::Big4;
        } else if (t.rfind("pair:", 0) == 0) {
            const auto parts = split(text, ':');
            if (parts.size() != 3)
                throw DataError("taxonomy pair mode must be pair:<e1>:<e2>");
            mode.kind = Kind::Pair;
            mode.pair_a = parse_emotion(parts[1]);
            mode.pair_b = parse_emotion(parts[2]);
            if (mode.pair_a == mode.pair_b)
                throw DataError("taxonomy pair mode needs two distinct emotions");
        } else {
            throw DataError("unknown taxonomy mode '" + text +
                            "'; expected emotions20 | big4 | pair:<e1>:<e2>");
        }
        return mode;
    }

    std::string to_string() const {
        switch (kind) {
            case Kind::Emotions20: return "emotions20";
            case Kind::Big4: return "big4";
            case Kind::Pair:
                return "pair:" + std::string(emotion_name(pair_a)) + ":" +
                       std::string(emotion_name(pair_b));
        }
        return "?";
    }

    int class_count() const {
        switch (kind) {
            case Kind::Emotions20: return kEmotionCount;
            case Kind::Big4: return kQuadrantCount;
            case Kind::Pair: return 2;
        }
        return 0;
    }

    std::vector<std::string> class_names() const {
        std::vector<std::string> names;
        switch (kind) {
            case Kind::Emotions20:
                for (auto n : kEmotionNames) names.emplace_back(n);
                break;
            case Kind::Big4:
                for (auto n : kQuadrantNames) names.emplace_back(n);
                break;
            case Kind::Pair:
                names.emplace_back(emotion_name(pair_a));
                names.emplace_back(emotion_name(pair_b));
                break;
        }
        return names;
    }

    // Task label for a clip; -1 when the clip is outside the task
    // (pair mode filters everything but the two emotions).
    int project(Emotion e) const {
        switch (kind) {
            case Kind::Emotions20: return static_cast<int>(e);
            case Kind::Big4: return static_cast<int>(quadrant_of(e));
            case Kind::Pair:
                if (e == pair_a) return 0;
                if (e == pair_b) return 1;
                return -1;
        }
        return -1;
    }
};

// Builds the classifier input for a task from labeled clips; clips
// outside the task are dropped.
inline LabeledSet make_labeled(const FeatureDataset& dataset,
                               const TaxonomyMode& mode) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (!dataset[i].emotion)
            throw DataError("clip without emotion label: " + dataset[i].clip_path);
        if (mode.project(*dataset[i].emotion) >= 0) keep.push_back(i);
    }
    if (keep.empty()) throw DataError("no clips match taxonomy mode " +
                                      mode.to_string());
    LabeledSet set;
    set.class_count = mode.class_count();
    set.x = Matrix(keep.size(), dataset[keep[0]].values.size());
    set.y.resize(keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        const auto& clip = dataset[keep[r]];
        if (clip.values.size() != set.x.cols())
            throw DataError("inconsistent feature length in dataset");
        for (std::size_t c = 0; c < set.x.cols(); ++c)
            set.x.at(r, c) = clip.values[c];
        set.y[r] = mode.project(*clip.emotion);
    }
    return set;
}

inline LabeledSet emotions_task(const FeatureDataset& dataset) {
    return make_labeled(dataset, TaxonomyMode{});
}

inline LabeledSet quadrant_task(const FeatureDataset& dataset) {
    TaxonomyMode mode;
    mode.kind = TaxonomyMode::Kind::Big4;
    return make_labeled(dataset, mode);
}

inline LabeledSet pairwise_task(const FeatureDataset& dataset, Emotion e1,
                                Emotion e2) {
    TaxonomyMode mode;
    mode.kind = TaxonomyMode::Kind::Pair;
    mode.pair_a = e1;
    mode.pair_b = e2;
    bool has_a = false, has_b = false;
    for (const auto& clip : dataset) {
        has_a |= clip.emotion == e1;
        has_b |= clip.emotion == e2;
    }
    if (!has_a || !has_b)
        throw DataError("pairwise task: emotion missing from dataset");
    return make_labeled(dataset, mode);
}

// ---------------------------------------------------------------------------
// Splits

struct SplitSpec {
    double train_fraction = 0.70;
    double val_fraction = 0.15;
    double test_fraction = 0.15;
    std::uint64_t seed = 0;

    void validate() const {
        if (train_fraction <= 0 || val_fraction <= 0 || test_fraction <= 0)
            throw std::invalid_argument("split fractions must be positive");
        const double sum = train_fraction + val_fraction + test_fraction;
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("split fractions must sum to 1");
    }
};

struct SplitIndices {
    std::vector<std::size_t> train, val, test;
};

namespace detail {

// Largest-remainder allocation of `m` items to the three fractions;
// remainder ties go to the earlier partition.
inline std::array<std::size_t, 3> allocate_counts(std::size_t m,
                                                  const SplitSpec& spec) {
    const double fractions[3] = {spec.train_fraction, spec.val_fraction,
                                 spec.test_fraction};
    std::array<std::size_t, 3> counts{};
    double remainders[3];
    std::size_t assigned = 0;
    for (int p = 0; p < 3; ++p) {
        const double ideal = static_cast<double>(m) * fractions[p];
        counts[p] = static_cast<std::size_t>(ideal);
        remainders[p] = ideal - static_cast<double>(counts[p]);
        assigned += counts[p];
    }
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return remainders[a] > remainders[b] ||
               (remainders[a] == remainders[b] && a < b);
    });
    for (std::size_t r = 0; r < m - assigned; ++r) ++counts[order[r % 3]];
    return counts;
}

}  // namespace detail

// Stratified split over (emotion, singer) strata (emotion alone when the
// dataset has a single singer), with per-stratum largest-remainder
// allocation and a fix-up pass that keeps every emotion present in every
// partition. Deterministic for a given (dataset, spec).
inline SplitIndices stratified_split(const FeatureDataset& dataset,
                                     const SplitSpec& spec) {
    spec.validate();
    if (dataset.empty()) throw DataError("stratified_split: empty dataset");

    std::set<std::string> singers;
    std::map<int, std::size_t> class_totals;
    for (const auto& clip : dataset) {
        if (!clip.emotion)
            throw DataError("stratified_split: clip without label: " +
                            clip.clip_path);
        singers.insert(clip.singer_id);
        ++class_totals[static_cast<int>(*clip.emotion)];
    }
    for (const auto& [cls, count] : class_totals)
        if (count < 3)
            throw DataError(strfmt(
                "stratified_split: class %s has %zu clips, need >= 3",
                std::string(emotion_name(static_cast<Emotion>(cls))).c_str(),
                count));

    const bool by_singer = singers.size() > 1;
    std::map<std::pair<int, std::string>, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < dataset.size(); ++i)
        strata[{static_cast<int>(*dataset[i].emotion),
                by_singer ? dataset[i].singer_id : std::string()}]
            .push_back(i);

    Rng rng(spec.seed);
    std::array<std::vector<std::size_t>, 3> parts;
    for (auto& [key, indices] : strata) {
        rng.shuffle(indices);
        const auto counts = detail::allocate_counts(indices.size(), spec);
        std::size_t cursor = 0;
        for (int p = 0; p < 3; ++p)
            for (std::size_t i = 0; i < counts[p]; ++i)
                parts[p].push_back(indices[cursor++]);
    }

    // Fix-up: an emotion absent from a partition borrows one clip from
    // the partition holding most of that emotion.
    for (const auto& [cls, total] : class_totals) {
        (void)total;
        auto count_in = [&](int p) {
            std::size_t n = 0;
            for (std::size_t i : parts[p])
                n += static_cast<int>(*dataset[i].emotion) == cls;
            return n;
        };
        for (int p = 0; p < 3; ++p) {
            if (count_in(p) > 0) continue;
            int donor = 0;
            for (int q = 1; q < 3; ++q)
                if (count_in(q) > count_in(donor)) donor = q;
            if (count_in(donor) < 2) continue;  // cannot borrow safely
            for (auto it = parts[donor].begin(); it != parts[donor].end(); ++it) {
                if (static_cast<int>(*dataset[*it].emotion) == cls) {
                    parts[p].push_back(*it);
                    parts[donor].erase(it);
                    break;
                }
            }
        }
    }

    for (auto& part : parts) std::sort(part.begin(), part.end());
    return {std::move(parts[0]), std::move(parts[1]), std::move(parts[2])};
}

// Generalization split: train on every singer but one, test on the
// held-out singer.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
singer_holdout(const FeatureDataset& dataset, const std::string& test_singer) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < dataset.size(); ++i)
        (dataset[i].singer_id == test_singer ? test : train).push_back(i);
    if (test.empty())
        throw DataError("singer_holdout: no clips for singer " + test_singer);
    if (train.empty())
        throw DataError("singer_holdout: no clips left for training");
    return {std::move(train), std::move(test)};
}

inline FeatureDataset subset(const FeatureDataset& dataset,
                             const std::vector<std::size_t>& indices) {
    FeatureDataset out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(dataset[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Metrics

struct Metrics {
    double accuracy = 0.0;  // percent
    double macro_f1 = 0.0;  // percent
    std::vector<double> precision, recall, f1;  // percent, per class
    std::vector<long long> confusion;  // class_count^2, rows = true labels
    int class_count = 0;
    long long total = 0;

    long long confusion_at(int truth, int predicted) const {
        return confusion[static_cast<std::size_t>(truth) *
                             static_cast<std::size_t>(class_count) +
                         static_cast<std::size_t>(predicted)];
    }
};

// Metrics from a row-major (true x predicted) count matrix. Classes with
// no support or no predictions get precision/recall/F1 = 0; macro-F1 is
// the unweighted mean over all classes.
inline Metrics metrics_from_confusion(std::vector<long long> confusion,
                                      int class_count) {
    Metrics m;
    m.class_count = class_count;
    m.confusion = std::move(confusion);
    long long correct = 0;
    m.precision.assign(class_count, 0.0);
    m.recall.assign(class_count, 0.0);
    m.f1.assign(class_count, 0.0);
    double f1_sum = 0.0;
    for (int c = 0; c < class_count; ++c) {
        long long support = 0, predicted = 0;
        for (int p = 0; p < class_count; ++p) {
            support += m.confusion_at(c, p);
            predicted += m.confusion_at(p, c);
        }
        const long long tp = m.confusion_at(c, c);
        correct += tp;
        m.total += support;
        const double precision =
            predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
        const double recall = support > 0 ? static_cast<double>(tp) / support : 0.0;
        const double f1 = precision + recall > 0.0
                              ? 2.0 * precision * recall / (precision + recall)
                              : 0.0;
        m.precision[c] = 100.0 * precision;
        m.recall[c] = 100.0 * recall;
        m.f1[c] = 100.0 * f1;
        f1_sum += f1;
    }
    if (m.total == 0) throw DataError("metrics: empty test set");
    m.accuracy = 100.0 * static_cast<double>(correct) / m.total;
    m.macro_f1 = 100.0 * f1_sum / class_count;
    return m;
}

inline Metrics evaluate(const Model& model, const LabeledSet& test) {
    if (test.size() == 0) throw DataError("evaluate: empty test set");
    if (static_cast<int>(test.dim()) != model.feature_count())
        throw std::invalid_argument("evaluate: feature count mismatch");
    const int classes = model.class_count();
    std::vector<long long> confusion(
        static_cast<std::size_t>(classes) * classes, 0);
    for (std::size_t i = 0; i < test.size(); ++i) {
        const int predicted = model.predict(test.x.row(i));
        ++confusion[static_cast<std::size_t>(test.y[i]) * classes + predicted];
    }
    return metrics_from_confusion(std::move(confusion), classes);
}

// ---------------------------------------------------------------------------
// Hyperparameter sweep

struct SweepPoint {
    double param = 0.0;
    Metrics val_metrics;
};

struct SweepResult {
    Family family = Family::Knn;
    std::vector<SweepPoint> grid;  // ascending parameter order
    double best_param = 0.0;
    Metrics test_metrics;
    ModelPtr best_model;  // refit on train+val
};

namespace detail {

inline LabeledSet concat(const LabeledSet& a, const LabeledSet& b) {
    LabeledSet out;
    out.class_count = a.class_count;
    out.x = Matrix(a.size() + b.size(), a.dim());
    out.y.reserve(a.size() + b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) out.x.at(i, j) = a.x.at(i, j);
        out.y.push_back(a.y[i]);
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j)
            out.x.at(a.size() + i, j) = b.x.at(i, j);
        out.y.push_back(b.y[i]);
    }
    return out;
}

}  // namespace detail

// Trains one model per grid value on `train`, scores each on `val` by
// macro-F1 (ties to the smaller value), refits the winner on train+val
// and scores it once on `test`. Model seeds derive as seed + grid index
// (refit: seed + grid size), so the sweep is deterministic under any
// thread count.
inline SweepResult sweep(Family family, std::vector<double> grid,
                         const LabeledSet& train, const LabeledSet& val,
                         const LabeledSet& test, const Hyperparams& hp_base,
                         std::uint64_t seed, int threads = 1) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    SweepResult result;
    result.family = family;
    result.grid.resize(grid.size());

    const bool inner_parallel =
        family == Family::RandomForest || family == Family::ExtraTrees;
    auto eval_point = [&](std::size_t i) {
        const Hyperparams hp = with_grid_value(family, hp_base, grid[i]);
        const ModelPtr model = train_model(family, train, hp, seed + i,
                                           inner_parallel ? threads : 1);
        result.grid[i] = {grid[i], evaluate(*model, val)};
    };
    if (inner_parallel) {
        for (std::size_t i = 0; i < grid.size(); ++i) eval_point(i);
    } else {
        parallel_for(grid.size(), threads, eval_point);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (result.grid[i].val_metrics.macro_f1 >
            result.grid[best].val_metrics.macro_f1)
            best = i;
    result.best_param = grid[best];

    const LabeledSet train_val = detail::concat(train, val);
    const Hyperparams hp = with_grid_value(family, hp_base, grid[best]);
    result.best_model =
        train_model(family, train_val, hp, seed + grid.size(), threads);
    result.test_metrics = evaluate(*result.best_model, test);
    return result;
}

}  // namespace prosody
