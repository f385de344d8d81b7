// Experiment runner behind the CLI: configuration, the extract /
// train-eval / select / report commands and their artifacts.
//
// All randomness flows from the single run seed through documented
// derivations (sweep: seed + grid index; selection: seed + round * n +
// candidate; forests: seed + tree index), so reruns with an identical
// configuration produce byte-identical artifact bodies.
#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "prosody/dataset.hpp"
#include "prosody/feature_cache.hpp"
#include "prosody/reports.hpp"

namespace prosody {

struct RunConfig {
    std::string data_root;
    std::string cache_path;
    std::string out_dir;
    std::string taxonomy = "emotions20";
    std::vector<std::string> singers;  // empty = all
    std::vector<Family> families;
    std::vector<double> grid;          // empty = per-family default
    AggregationParams aggregation;
    SplitSpec split;
    std::uint64_t seed = 0;
    int threads = 0;                   // 0 = hardware concurrency
    int max_features = 0;              // selection early stop; 0 = all
    Hyperparams hyperparams;

    int effective_threads() const {
        return threads > 0 ? threads : static_cast<int>(hardware_threads());
    }
};

// Fingerprint of the semantically meaningful configuration. The output
// directory and thread count are excluded: results are independent of
// both, and keeping them out lets such runs compare byte-equal.
inline std::string config_hash(const RunConfig& cfg) {
    std::ostringstream os;
    os << "data=" << cfg.data_root << ";cache=" << cfg.cache_path
       << ";taxonomy=" << cfg.taxonomy << ";singers=";
    for (const auto& s : cfg.singers) os << s << ',';
    os << ";families=";
    for (Family f : cfg.families) os << family_name(f) << ',';
    os << ";grid=";
    for (double g : cfg.grid) os << format_g9(g) << ',';
    os << ";agg=" << format_g9(cfg.aggregation.st_win) << ','
       << format_g9(cfg.aggregation.st_step) << ','
       << format_g9(cfg.aggregation.mt_win) << ','
       << format_g9(cfg.aggregation.mt_step)
       << ";split=" << format_g9(cfg.split.train_fraction) << ','
       << format_g9(cfg.split.val_fraction) << ','
       << format_g9(cfg.split.test_fraction) << ";seed=" << cfg.seed
       << ";max_features=" << cfg.max_features;
    return strfmt("%016llx",
                  static_cast<unsigned long long>(fnv1a64(os.str())));
}

inline RunStamp run_stamp(const RunConfig& cfg) {
    return {config_hash(cfg), cfg.seed};
}

// ---------------------------------------------------------------------------
// extract

struct ExtractStats {
    std::size_t total = 0;
    std::size_t extracted = 0;
    std::size_t reused = 0;
    std::size_t failed = 0;
};

namespace detail {

// Sidecar with the source file sizes behind each cache row, enabling the
// path + file-size + params skip rule on re-runs.
inline std::string sidecar_path(const std::string& cache_path) {
    return cache_path + ".meta";
}

inline std::map<std::string, std::uintmax_t> read_sidecar(
    const std::string& cache_path) {
    std::map<std::string, std::uintmax_t> sizes;
    std::ifstream in(sidecar_path(cache_path));
    if (!in) return sizes;
    try {
        nlohmann::json j;
        in >> j;
        for (auto it = j.begin(); it != j.end(); ++it)
            sizes[it.key()] = it.value().get<std::uintmax_t>();
    } catch (const std::exception&) {
        sizes.clear();  // unreadable sidecar just disables reuse
    }
    return sizes;
}

inline void write_sidecar(const std::string& cache_path,
                          const std::map<std::string, std::uintmax_t>& sizes) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [path, size] : sizes) j[path] = size;
    std::ofstream out(sidecar_path(cache_path), std::ios::binary);
    if (!out) throw DataError("cannot write cache sidecar for " + cache_path);
    out << j.dump(2) << '\n';
}

}  // namespace detail

// Scans the dataset, extracts clip vectors (skipping clips whose cached
// row still matches by path, file size and parameters) and rewrites the
// cache. Fails when more than 10% of the files cannot be processed.
inline ExtractStats run_extract(const RunConfig& cfg) {
    cfg.aggregation.validate();
    const DatasetManifest manifest = scan_dataset(cfg.data_root);

    std::map<std::string, ClipFeatures> cached;
    std::map<std::string, std::uintmax_t> cached_sizes;
    if (std::filesystem::exists(cfg.cache_path)) {
        try {
            for (auto& clip : read_feature_cache(cfg.cache_path, cfg.aggregation))
                cached[clip.clip_path] = std::move(clip);
            cached_sizes = detail::read_sidecar(cfg.cache_path);
        } catch (const DataError& e) {
            log_warn(std::string("ignoring existing cache: ") + e.what());
            cached.clear();
            cached_sizes.clear();
        }
    }

    ExtractStats stats;
    stats.total = manifest.entries.size();
    std::vector<ClipFeatures> rows(manifest.entries.size());
    std::vector<int> status(manifest.entries.size(), 0);  // 1 ok, 2 reused, 3 failed
    std::map<std::string, std::uintmax_t> sizes;
    for (const auto& entry : manifest.entries) {
        std::error_code ec;
        const auto size = std::filesystem::file_size(entry.clip_path, ec);
        sizes[entry.clip_path] = ec ? 0 : size;
    }

    parallel_for(manifest.entries.size(), cfg.effective_threads(),
                 [&](std::size_t i) {
        const auto& entry = manifest.entries[i];
        const auto hit = cached.find(entry.clip_path);
        const auto size_it = cached_sizes.find(entry.clip_path);
        if (hit != cached.end() && size_it != cached_sizes.end() &&
            size_it->second == sizes.at(entry.clip_path)) {
            rows[i] = hit->second;
            status[i] = 2;
            return;
        }
        try {
            AudioClip clip = load_wav(entry.clip_path);
            clip = resample(clip, kCanonicalSampleRate);
            ClipFeatures features;
            features.values = extract_clip(clip, cfg.aggregation);
            features.clip_path = entry.clip_path;
            features.singer_id = entry.singer_id;
            features.emotion = entry.emotion;
            rows[i] = std::move(features);
            status[i] = 1;
        } catch (const std::exception& e) {
            log_warn(strfmt("skipping %s: %s", entry.clip_path.c_str(), e.what()));
            status[i] = 3;
        }
    });

    std::vector<ClipFeatures> kept;
    std::map<std::string, std::uintmax_t> kept_sizes;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (status[i] == 1) ++stats.extracted;
        if (status[i] == 2) ++stats.reused;
        if (status[i] == 3) {
            ++stats.failed;
            continue;
        }
        kept_sizes[rows[i].clip_path] = sizes[rows[i].clip_path];
        kept.push_back(std::move(rows[i]));
    }

    write_feature_cache(cfg.cache_path, cfg.aggregation, kept);
    detail::write_sidecar(cfg.cache_path, kept_sizes);
    log_info(strfmt("extract: %zu extracted, %zu reused, %zu failed of %zu",
                    stats.extracted, stats.reused, stats.failed, stats.total));

    if (stats.failed * 10 > stats.total)
        throw DataError(strfmt("extraction failed for %zu of %zu files (> 10%%)",
                               stats.failed, stats.total));
    return stats;
}

// ---------------------------------------------------------------------------
// train-eval

namespace detail {

inline FeatureDataset load_filtered_dataset(const RunConfig& cfg) {
    FeatureDataset dataset = read_feature_cache(cfg.cache_path, cfg.aggregation);
    if (!cfg.singers.empty()) {
        FeatureDataset filtered;
        for (auto& clip : dataset)
            for (const auto& s : cfg.singers)
                if (clip.singer_id == s) {
                    filtered.push_back(std::move(clip));
                    break;
                }
        dataset = std::move(filtered);
    }
    if (dataset.empty())
        throw DataError("no clips left after singer filtering");
    return dataset;
}

// Clips in-task, split, and the three labeled partitions.
struct TaskSplit {
    TaxonomyMode mode;
    LabeledSet train, val, test;
};

inline TaskSplit prepare_task(const RunConfig& cfg) {
    TaskSplit task;
    task.mode = TaxonomyMode::parse(cfg.taxonomy);
    FeatureDataset dataset = load_filtered_dataset(cfg);

    FeatureDataset in_task;
    for (auto& clip : dataset) {
        if (!clip.emotion)
            throw DataError("unlabeled clip in cache: " + clip.clip_path);
        if (task.mode.project(*clip.emotion) >= 0)
            in_task.push_back(std::move(clip));
    }
    if (in_task.empty())
        throw DataError("no clips match taxonomy mode " + cfg.taxonomy);

    SplitSpec spec = cfg.split;
    spec.seed = cfg.seed;
    const SplitIndices split = stratified_split(in_task, spec);
    task.train = make_labeled(subset(in_task, split.train), task.mode);
    task.val = make_labeled(subset(in_task, split.val), task.mode);
    task.test = make_labeled(subset(in_task, split.test), task.mode);
    return task;
}

}  // namespace detail

// Runs split -> sweep -> test evaluation for every configured family and
// writes metrics.json, sweep.csv and per-family confusion/model files
// (canonical confusion.csv / model.json names for a single family).
inline std::vector<SweepResult> run_train_eval(const RunConfig& cfg) {
    if (cfg.families.empty())
        throw DataError("train-eval: no model family configured");
    const detail::TaskSplit task = detail::prepare_task(cfg);
    std::filesystem::create_directories(cfg.out_dir);

    std::vector<SweepResult> sweeps;
    for (Family family : cfg.families) {
        const std::vector<double> grid =
            cfg.grid.empty() ? default_grid(family) : cfg.grid;
        sweeps.push_back(sweep(family, grid, task.train, task.val, task.test,
                               cfg.hyperparams, cfg.seed,
                               cfg.effective_threads()));
        log_info(strfmt("%s: best param %s, test accuracy %s",
                        family_name(family),
                        format_g9(sweeps.back().best_param).c_str(),
                        format_percent(sweeps.back().test_metrics.accuracy).c_str()));
    }

    const RunStamp stamp = run_stamp(cfg);
    const auto class_names = task.mode.class_names();
    const nlohmann::json run_info = {
        {"taxonomy", task.mode.to_string()},
        {"split",
         {{"train", cfg.split.train_fraction},
          {"val", cfg.split.val_fraction},
          {"test", cfg.split.test_fraction}}},
        {"train_clips", task.train.size()},
        {"val_clips", task.val.size()},
        {"test_clips", task.test.size()}};

    const auto out = [&](const std::string& name) {
        return (std::filesystem::path(cfg.out_dir) / name).string();
    };
    write_metrics_json(out("metrics.json"), stamp, run_info, sweeps, class_names);
    write_sweep_csv(out("sweep.csv"), stamp, sweeps);
    for (const auto& s : sweeps) {
        const bool single = sweeps.size() == 1;
        const std::string suffix =
            single ? "" : std::string("_") + family_name(s.family);
        write_confusion_csv(out("confusion" + suffix + ".csv"), stamp,
                            s.test_metrics, class_names);
        nlohmann::json model_json = model_to_json(*s.best_model);
        model_json["config_hash"] = stamp.config_hash;
        std::ofstream model_out(out("model" + suffix + ".json"),
                                std::ios::binary);
        if (!model_out)
            throw DataError("cannot write model artifact to " + cfg.out_dir);
        model_out << model_json.dump(2) << '\n';
    }
    return sweeps;
}

// ---------------------------------------------------------------------------
// select

inline SelectionTrace run_select(const RunConfig& cfg) {
    const detail::TaskSplit task = detail::prepare_task(cfg);
    std::filesystem::create_directories(cfg.out_dir);

    FfnnConfig probe;
    probe.hidden = cfg.hyperparams.ffnn_hidden;
    probe.epochs = cfg.hyperparams.ffnn_epochs;
    probe.batch = cfg.hyperparams.ffnn_batch;
    probe.learning_rate = cfg.hyperparams.ffnn_learning_rate;

    const auto start = std::chrono::steady_clock::now();
    const SelectionTrace trace =
        additive_selection(task.train, task.val, probe, cfg.seed,
                           cfg.max_features, cfg.effective_threads());
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();

    const RunStamp stamp = run_stamp(cfg);
    const auto out = [&](const std::string& name) {
        return (std::filesystem::path(cfg.out_dir) / name).string();
    };
    write_selection_csv(out("selection.csv"), stamp, trace);
    write_selection_meta(out("selection_meta.json"), stamp, trace, probe, wall);
    log_info(strfmt("select: ranked %zu features with %zu probe models",
                    trace.ranking.size(), trace.models_trained));
    return trace;
}

// ---------------------------------------------------------------------------
// report

// Pretty-prints metrics.json as an aligned per-family table.
inline std::string render_report(const std::string& metrics_path) {
    std::ifstream in(metrics_path);
    if (!in) throw DataError("cannot open metrics file: " + metrics_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError(strfmt("malformed metrics JSON %s: %s",
                               metrics_path.c_str(), e.what()));
    }

    std::string out;
    out += strfmt("taxonomy: %s   seed: %llu   config: %s\n",
                  j.at("run").at("taxonomy").get<std::string>().c_str(),
                  static_cast<unsigned long long>(j.at("seed").get<std::uint64_t>()),
                  j.at("config_hash").get<std::string>().c_str());
    out += strfmt("%-18s %10s %10s %12s\n", "Model", "Accuracy", "F1",
                  "Hyperparam");
    for (const auto& fam : j.at("results")) {
        const auto& test = fam.at("test");
        out += strfmt("%-18s %10.1f %10.1f %12s\n",
                      fam.at("family").get<std::string>().c_str(),
                      test.at("accuracy").get<double>(),
                      test.at("macro_f1").get<double>(),
                      format_g9(fam.at("best_param").get<double>()).c_str());
    }
    return out;
}

}  // namespace prosody
