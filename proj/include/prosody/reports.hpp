// Artifact writers. Every artifact embeds the run's config hash and
// seed; reported percentages carry one decimal. Bodies contain nothing
// time-dependent, so identical runs produce byte-identical files
// (selection_meta.json, which records wall-clock, is the one exception).
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "prosody/evaluation.hpp"
#include "prosody/selection.hpp"

namespace prosody {

inline std::string format_percent(double v) { return strfmt("%.1f", v); }

namespace detail {

inline double round_percent(double v) {
    // Keep JSON numerics at the same one-decimal precision as the CSVs.
    return std::stod(format_percent(v));
}

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write artifact: " + path);
    out << body;
}

}  // namespace detail

struct RunStamp {
    std::string config_hash;
    std::uint64_t seed = 0;
};

inline nlohmann::json metrics_to_json(const Metrics& m,
                                      const std::vector<std::string>& names) {
    nlohmann::json per_class = nlohmann::json::array();
    for (int c = 0; c < m.class_count; ++c)
        per_class.push_back({{"class", names[static_cast<std::size_t>(c)]},
                             {"precision", detail::round_percent(m.precision[c])},
                             {"recall", detail::round_percent(m.recall[c])},
                             {"f1", detail::round_percent(m.f1[c])}});
    return {{"accuracy", detail::round_percent(m.accuracy)},
            {"macro_f1", detail::round_percent(m.macro_f1)},
            {"per_class", std::move(per_class)},
            {"total", m.total}};
}

// metrics.json: one entry per swept family with its grid curve, best
// hyperparameter and test metrics.
inline void write_metrics_json(const std::string& path, const RunStamp& stamp,
                               const nlohmann::json& run_info,
                               const std::vector<SweepResult>& sweeps,
                               const std::vector<std::string>& class_names) {
    nlohmann::json families = nlohmann::json::array();
    for (const auto& s : sweeps) {
        nlohmann::json grid = nlohmann::json::array();
        for (const auto& point : s.grid)
            grid.push_back(
                {{"param", point.param},
                 {"val_accuracy", detail::round_percent(point.val_metrics.accuracy)},
                 {"val_f1", detail::round_percent(point.val_metrics.macro_f1)}});
        families.push_back({{"family", family_name(s.family)},
                            {"grid", std::move(grid)},
                            {"best_param", s.best_param},
                            {"test", metrics_to_json(s.test_metrics, class_names)}});
    }
    nlohmann::json j = {{"config_hash", stamp.config_hash},
                        {"seed", stamp.seed},
                        {"run", run_info},
                        {"results", std::move(families)}};
    detail::write_text_file(path, j.dump(2) + "\n");
}

// confusion.csv: leading stamp comment, then a header row/column of
// canonical class names around integer counts (rows = true classes).
inline void write_confusion_csv(const std::string& path, const RunStamp& stamp,
                                const Metrics& m,
                                const std::vector<std::string>& names) {
    std::string body = strfmt("# config_hash=%s seed=%llu\n",
                              stamp.config_hash.c_str(),
                              static_cast<unsigned long long>(stamp.seed));
    body += "true\\predicted";
    for (const auto& n : names) body += "," + n;
    body += "\n";
    for (int t = 0; t < m.class_count; ++t) {
        body += names[static_cast<std::size_t>(t)];
        for (int p = 0; p < m.class_count; ++p)
            body += strfmt(",%lld", m.confusion_at(t, p));
        body += "\n";
    }
    detail::write_text_file(path, body);
}

// sweep.csv: one row per grid point across all swept families.
inline void write_sweep_csv(const std::string& path, const RunStamp& stamp,
                            const std::vector<SweepResult>& sweeps) {
    std::string body = strfmt("# config_hash=%s seed=%llu\n",
                              stamp.config_hash.c_str(),
                              static_cast<unsigned long long>(stamp.seed));
    body += "family,param,val_accuracy,val_f1\n";
    for (const auto& s : sweeps)
        for (const auto& point : s.grid)
            body += strfmt("%s,%s,%s,%s\n", family_name(s.family),
                           format_g9(point.param).c_str(),
                           format_percent(point.val_metrics.accuracy).c_str(),
                           format_percent(point.val_metrics.macro_f1).c_str());
    detail::write_text_file(path, body);
}

// selection.csv: the ranking with canonical aggregate feature names and
// the cumulative validation F1 after each addition.
inline void write_selection_csv(const std::string& path, const RunStamp& stamp,
                                const SelectionTrace& trace) {
    std::string body = strfmt("# config_hash=%s seed=%llu\n",
                              stamp.config_hash.c_str(),
                              static_cast<unsigned long long>(stamp.seed));
    body += "rank,feature_index,feature_name,cumulative_f1\n";
    for (std::size_t r = 0; r < trace.ranking.size(); ++r)
        body += strfmt("%zu,%d,%s,%s\n", r + 1, trace.ranking[r],
                       aggregate_feature_name(trace.ranking[r]).c_str(),
                       format_percent(trace.f1_curve[r]).c_str());
    detail::write_text_file(path, body);
}

inline void write_selection_meta(const std::string& path, const RunStamp& stamp,
                                 const SelectionTrace& trace,
                                 const FfnnConfig& probe,
                                 double wall_clock_seconds) {
    nlohmann::json j = {{"config_hash", stamp.config_hash},
                        {"seed", stamp.seed},
                        {"models_trained", trace.models_trained},
                        {"features_ranked", trace.ranking.size()},
                        {"probe",
                         {{"hidden", probe.hidden},
                          {"epochs", probe.epochs},
                          {"batch", probe.batch},
                          {"learning_rate", probe.learning_rate}}},
                        {"wall_clock_seconds", wall_clock_seconds}};
    detail::write_text_file(path, j.dump(2) + "\n");
}

}  // namespace prosody
