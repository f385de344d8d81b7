// prosody: emotion classification experiments over prosodic audio
// features.
//
// Subcommands:
//   extract    scan a dataset and build the clip feature cache
//   train-eval sweep one or more model families and evaluate on test
//   select     additive feature selection with the network probe
//   report     pretty-print a metrics.json as an aligned table
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prosody/prosody.hpp"

namespace {

struct CliOptions {
    prosody::RunConfig config;
    std::string singers_arg = "all";
    std::string family_arg;
    std::string grid_arg;
    std::string metrics_path;  // report only
};

void add_common_flags(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--cache", opts.config.cache_path, "Feature cache CSV path")
        ->required();
    cmd->add_option("--seed", opts.config.seed, "Run seed (all randomness derives from it)");
    cmd->add_option("--threads", opts.config.threads,
                    "Worker threads (default: logical cores)");
    cmd->add_option("--st-win", opts.config.aggregation.st_win,
                    "Short-term window seconds");
    cmd->add_option("--st-step", opts.config.aggregation.st_step,
                    "Short-term step seconds");
    cmd->add_option("--mt-win", opts.config.aggregation.mt_win,
                    "Mid-term window seconds");
    cmd->add_option("--mt-step", opts.config.aggregation.mt_step,
                    "Mid-term step seconds");
}

void add_task_flags(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--out", opts.config.out_dir, "Output directory")->required();
    cmd->add_option("--taxonomy", opts.config.taxonomy,
                    "emotions20 | big4 | pair:<e1>:<e2>");
    cmd->add_option("--singers", opts.singers_arg,
                    "Comma-separated singer ids, or 'all'");
}

void finalize(CliOptions& opts) {
    if (opts.singers_arg != "all" && !opts.singers_arg.empty())
        opts.config.singers = prosody::split(opts.singers_arg, ',');
    if (!opts.family_arg.empty()) {
        if (prosody::to_lower(opts.family_arg) == "all") {
            opts.config.families = {
                prosody::Family::Knn,          prosody::Family::Svm,
                prosody::Family::ExtraTrees,   prosody::Family::GradientBoosting,
                prosody::Family::RandomForest, prosody::Family::Ffnn};
        } else {
            for (const auto& name : prosody::split(opts.family_arg, ','))
                opts.config.families.push_back(prosody::parse_family(name));
        }
    }
    if (!opts.grid_arg.empty())
        for (const auto& value : prosody::split(opts.grid_arg, ','))
            opts.config.grid.push_back(std::stod(value));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Emotion classification from prosodic audio features"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML config file; command-line flags win");
    // Lets --config appear after the subcommand name.
    app.fallthrough();

    CliOptions opts;

    auto* extract = app.add_subcommand("extract", "Build the feature cache");
    extract->add_option("--data", opts.config.data_root, "Dataset root directory")
        ->required();
    add_common_flags(extract, opts);

    auto* train_eval =
        app.add_subcommand("train-eval", "Sweep families and evaluate");
    add_common_flags(train_eval, opts);
    add_task_flags(train_eval, opts);
    train_eval
        ->add_option("--family", opts.family_arg,
                     "knn|svm|random_forest|extra_trees|gradient_boosting|ffnn, "
                     "comma list, or 'all'")
        ->required();
    train_eval->add_option("--grid", opts.grid_arg,
                           "Comma-separated hyperparameter grid override");

    auto* select = app.add_subcommand("select", "Additive feature selection");
    add_common_flags(select, opts);
    add_task_flags(select, opts);
    select->add_option("--max-features", opts.config.max_features,
                       "Stop after ranking this many features (0 = all)");

    auto* report = app.add_subcommand("report", "Render metrics.json as a table");
    report->add_option("metrics", opts.metrics_path, "Path to metrics.json")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        finalize(opts);
        if (extract->parsed()) {
            const auto stats = prosody::run_extract(opts.config);
            std::printf("extracted %zu, reused %zu, failed %zu (of %zu clips)\n",
                        stats.extracted, stats.reused, stats.failed, stats.total);
        } else if (train_eval->parsed()) {
            prosody::run_train_eval(opts.config);
            std::printf("%s\n",
                        prosody::render_report(
                            (std::filesystem::path(opts.config.out_dir) /
                             "metrics.json")
                                .string())
                            .c_str());
        } else if (select->parsed()) {
            const auto trace = prosody::run_select(opts.config);
            std::printf("ranked %zu features (%zu probe models)\n",
                        trace.ranking.size(), trace.models_trained);
        } else if (report->parsed()) {
            std::printf("%s", prosody::render_report(opts.metrics_path).c_str());
        }
    } catch (const prosody::DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
