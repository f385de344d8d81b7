// Model persistence: versioned JSON with family tag, hyperparameters,
// seed, standardization vectors and flattened parameters. Loading
// validates internal shapes and fails loudly on mismatches.
#pragma once

#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

#include "prosody/classify/forest.hpp"
#include "prosody/classify/gradient_boosting.hpp"
#include "prosody/classify/knn.hpp"
#include "prosody/classify/linear_svm.hpp"
#include "prosody/classify/network.hpp"

namespace prosody {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

using nlohmann::json;

inline json base_to_json(const Model& model, const FittedBase& base) {
    json j;
    j["version"] = kModelFormatVersion;
    j["family"] = family_name(model.family());
    j["class_count"] = base.class_count;
    j["feature_count"] = base.feature_count;
    j["seed"] = base.seed;
    j["standardizer"] = {{"mean", base.standardizer.mean},
                         {"scale", base.standardizer.scale}};
    return j;
}

inline FittedBase base_from_json(const json& j) {
    FittedBase base;
    base.class_count = j.at("class_count").get<int>();
    base.feature_count = j.at("feature_count").get<int>();
    base.seed = j.at("seed").get<std::uint64_t>();
    base.standardizer.mean =
        j.at("standardizer").at("mean").get<std::vector<double>>();
    base.standardizer.scale =
        j.at("standardizer").at("scale").get<std::vector<double>>();
    if (static_cast<int>(base.standardizer.mean.size()) != base.feature_count ||
        static_cast<int>(base.standardizer.scale.size()) != base.feature_count)
        throw DataError("model file: standardizer length does not match "
                        "feature_count");
    return base;
}

inline json matrix_to_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

inline Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != m.rows() * m.cols())
        throw DataError("model file: matrix payload size mismatch");
    m.data() = data;
    return m;
}

inline json tree_to_json(const TreeNodes& t) {
    return {{"feature", t.feature},
            {"threshold", t.threshold},
            {"left", t.left},
            {"right", t.right},
            {"value", t.value}};
}

inline TreeNodes tree_from_json(const json& j) {
    TreeNodes t;
    t.feature = j.at("feature").get<std::vector<int>>();
    t.threshold = j.at("threshold").get<std::vector<double>>();
    t.left = j.at("left").get<std::vector<int>>();
    t.right = j.at("right").get<std::vector<int>>();
    t.value = j.at("value").get<std::vector<double>>();
    const std::size_t n = t.feature.size();
    if (t.threshold.size() != n || t.left.size() != n || t.right.size() != n ||
        t.value.size() != n || n == 0)
        throw DataError("model file: malformed tree payload");
    return t;
}

}  // namespace detail

inline nlohmann::json model_to_json(const Model& model) {
    using detail::json;
    if (const auto* knn = dynamic_cast<const KnnModel*>(&model)) {
        json j = detail::base_to_json(model, knn->base());
        j["hyperparams"] = {{"k", knn->k()}};
        j["params"] = {{"train_x", detail::matrix_to_json(knn->train_x())},
                       {"train_y", knn->train_y()}};
        return j;
    }
    if (const auto* svm = dynamic_cast<const LinearSvmModel*>(&model)) {
        json j = detail::base_to_json(model, svm->base());
        j["hyperparams"] = {{"c", svm->c()}};
        j["params"] = {{"weights", detail::matrix_to_json(svm->weights())}};
        return j;
    }
    if (const auto* forest = dynamic_cast<const ForestModel*>(&model)) {
        json j = detail::base_to_json(model, forest->base());
        j["hyperparams"] = {{"n_trees", forest->trees().size()}};
        json trees = json::array();
        for (const auto& t : forest->trees()) trees.push_back(detail::tree_to_json(t));
        j["params"] = {{"trees", std::move(trees)}};
        return j;
    }
    if (const auto* gbm = dynamic_cast<const GradientBoostingModel*>(&model)) {
        json j = detail::base_to_json(model, gbm->base());
        j["hyperparams"] = {{"n_stages", gbm->stages().empty()
                                             ? 0
                                             : gbm->stages()[0].size()},
                            {"learning_rate", gbm->learning_rate()}};
        json stages = json::array();
        for (const auto& class_trees : gbm->stages()) {
            json arr = json::array();
            for (const auto& t : class_trees) arr.push_back(detail::tree_to_json(t));
            stages.push_back(std::move(arr));
        }
        j["params"] = {{"init_scores", gbm->init_scores()},
                       {"stages", std::move(stages)}};
        return j;
    }
    if (const auto* net = dynamic_cast<const FfnnModel*>(&model)) {
        json j = detail::base_to_json(model, net->base());
        j["hyperparams"] = {{"hidden", net->config().hidden},
                            {"epochs", net->config().epochs},
                            {"batch", net->config().batch},
                            {"learning_rate", net->config().learning_rate}};
        json layers = json::array();
        for (int l = 0; l < 3; ++l)
            layers.push_back({{"w", detail::matrix_to_json(net->params().w[l])},
                              {"b", net->params().b[l]}});
        j["params"] = {{"layers", std::move(layers)}};
        return j;
    }
    throw std::invalid_argument("model_to_json: unknown model type");
}

inline ModelPtr model_from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != kModelFormatVersion)
        throw DataError(strfmt("model file: unsupported version %d",
                               j.at("version").get<int>()));
    const std::string family = j.at("family").get<std::string>();
    detail::FittedBase base = detail::base_from_json(j);
    const auto& params = j.at("params");

    if (family == "knn") {
        Matrix train_x = detail::matrix_from_json(params.at("train_x"));
        auto train_y = params.at("train_y").get<std::vector<int>>();
        if (train_x.rows() != train_y.size() ||
            static_cast<int>(train_x.cols()) != base.feature_count)
            throw DataError("model file: knn payload shape mismatch");
        return std::make_shared<KnnModel>(
            std::move(base), std::move(train_x), std::move(train_y),
            j.at("hyperparams").at("k").get<int>());
    }
    if (family == "svm") {
        Matrix weights = detail::matrix_from_json(params.at("weights"));
        if (weights.rows() != static_cast<std::size_t>(base.class_count) ||
            weights.cols() != static_cast<std::size_t>(base.feature_count) + 1)
            throw DataError("model file: svm payload shape mismatch");
        return std::make_shared<LinearSvmModel>(
            std::move(base), std::move(weights),
            j.at("hyperparams").at("c").get<double>());
    }
    if (family == "random_forest" || family == "extra_trees") {
        std::vector<TreeNodes> trees;
        for (const auto& t : params.at("trees"))
            trees.push_back(detail::tree_from_json(t));
        if (trees.empty()) throw DataError("model file: empty forest");
        return std::make_shared<ForestModel>(std::move(base), std::move(trees),
                                             family == "extra_trees");
    }
    if (family == "gradient_boosting") {
        auto init_scores = params.at("init_scores").get<std::vector<double>>();
        if (static_cast<int>(init_scores.size()) != base.class_count)
            throw DataError("model file: gbm payload shape mismatch");
        std::vector<std::vector<TreeNodes>> stages;
        for (const auto& arr : params.at("stages")) {
            std::vector<TreeNodes> class_trees;
            for (const auto& t : arr) class_trees.push_back(detail::tree_from_json(t));
            stages.push_back(std::move(class_trees));
        }
        if (static_cast<int>(stages.size()) != base.class_count)
            throw DataError("model file: gbm stage count mismatch");
        return std::make_shared<GradientBoostingModel>(
            std::move(base), std::move(init_scores), std::move(stages),
            j.at("hyperparams").at("learning_rate").get<double>(),
            std::vector<double>{});
    }
    if (family == "ffnn") {
        FfnnParams p;
        for (const auto& layer : params.at("layers")) {
            p.w.push_back(detail::matrix_from_json(layer.at("w")));
            p.b.push_back(layer.at("b").get<std::vector<double>>());
        }
        if (p.w.size() != 3 ||
            static_cast<int>(p.w[0].cols()) != base.feature_count ||
            static_cast<int>(p.w[2].rows()) != base.class_count)
            throw DataError("model file: ffnn payload shape mismatch");
        FfnnConfig config;
        config.hidden = j.at("hyperparams").at("hidden").get<int>();
        config.epochs = j.at("hyperparams").at("epochs").get<int>();
        config.batch = j.at("hyperparams").at("batch").get<int>();
        config.learning_rate =
            j.at("hyperparams").at("learning_rate").get<double>();
        return std::make_shared<FfnnModel>(std::move(base), std::move(p), config);
    }
    throw DataError("model file: unknown family '" + family + "'");
}

inline void save_model(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path);
    out << model_to_json(model).dump(2) << '\n';
}

inline ModelPtr load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError(strfmt("malformed model JSON %s: %s", path.c_str(),
                               e.what()));
    }
    return model_from_json(j);
}

// Uniform training entry point: every family trains through this with
// one swept hyperparameter; the evaluation harness contains no
// family-specific branches.
inline ModelPtr train_model(Family family, const LabeledSet& data,
                            const Hyperparams& hp, std::uint64_t seed,
                            int threads = 1) {
    switch (family) {
        case Family::Knn:
            return train_knn(data, hp.knn_k, seed);
        case Family::Svm:
            return train_linear_svm(data, hp.svm_c, seed, hp.svm_epochs);
        case Family::RandomForest:
            return train_random_forest(data, hp.n_trees, seed, threads);
        case Family::ExtraTrees:
            return train_extra_trees(data, hp.n_trees, seed, threads);
        case Family::GradientBoosting:
            return train_gradient_boosting(data, hp.n_boost_stages, seed,
                                           hp.gbm_learning_rate, hp.gbm_depth);
        case Family::Ffnn: {
            FfnnConfig config;
            config.hidden = hp.ffnn_hidden;
            config.epochs = hp.ffnn_epochs;
            config.batch = hp.ffnn_batch;
            config.learning_rate = hp.ffnn_learning_rate;
            return train_ffnn(data, config, seed);
        }
    }
    throw std::invalid_argument("train_model: unknown family");
}

// Applies one grid value to the family's swept hyperparameter.
inline Hyperparams with_grid_value(Family family, Hyperparams hp, double value) {
    switch (family) {
        case Family::Knn: hp.knn_k = static_cast<int>(std::lround(value)); break;
        case Family::Svm: hp.svm_c = value; break;
        case Family::RandomForest:
        case Family::ExtraTrees:
            hp.n_trees = static_cast<int>(std::lround(value));
            break;
        case Family::GradientBoosting:
            hp.n_boost_stages = static_cast<int>(std::lround(value));
            break;
        case Family::Ffnn:
            hp.ffnn_epochs = static_cast<int>(std::lround(value));
            break;
    }
    return hp;
}

// Default sweep grids per family.
inline std::vector<double> default_grid(Family family) {
    switch (family) {
        case Family::Knn: return {1, 3, 5, 7, 9, 11, 15, 21};
        case Family::Svm: return {0.1, 0.5, 1, 5, 10};
        case Family::RandomForest:
        case Family::ExtraTrees:
        case Family::GradientBoosting: return {100, 200, 500};
        case Family::Ffnn: return {5};
    }
    return {};
}

}  // namespace prosody
