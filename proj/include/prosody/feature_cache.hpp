// Clip feature cache: one CSV row per clip with the 136 aggregate
// values. The first line records the aggregation parameters and the
// feature-order version so a stale cache is rejected instead of silently
// mixing layouts.
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "prosody/aggregation.hpp"
#include "prosody/common.hpp"
#include "prosody/taxonomy.hpp"

namespace prosody {

inline constexpr int kFeatureOrderVersion = 1;

namespace detail {

inline std::string cache_header(const AggregationParams& params) {
    return strfmt(
        "# prosody-feature-cache v%d st_win=%s st_step=%s mt_win=%s mt_step=%s "
        "n_features=%d",
        kFeatureOrderVersion, format_g9(params.st_win).c_str(),
        format_g9(params.st_step).c_str(), format_g9(params.mt_win).c_str(),
        format_g9(params.mt_step).c_str(), kClipFeatureCount);
}

}  // namespace detail

inline void write_feature_cache(const std::string& path,
                                const AggregationParams& params,
                                const std::vector<ClipFeatures>& clips) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write feature cache: " + path);
    out << detail::cache_header(params) << '\n';
    out << "clip_path,singer_id,emotion";
    for (int i = 0; i < kClipFeatureCount; ++i) out << ",f" << (i + 1);
    out << '\n';
    for (const auto& clip : clips) {
        out << clip.clip_path << ',' << clip.singer_id << ','
            << (clip.emotion ? emotion_name(*clip.emotion) : std::string_view(""));
        for (double v : clip.values) out << ',' << format_g9(v);
        out << '\n';
    }
}

// Loads a cache written with the same parameters; any mismatch in the
// header line (params or feature-order version) is a stale cache.
inline std::vector<ClipFeatures> read_feature_cache(
    const std::string& path, const AggregationParams& params) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open feature cache: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty feature cache: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string expected = detail::cache_header(params);
    if (line != expected)
        throw DataError("stale feature cache (params or version mismatch): " +
                        path + "\n  found:    " + line +
                        "\n  expected: " + expected);
    if (!std::getline(in, line))
        throw DataError("feature cache missing column header: " + path);

    std::vector<ClipFeatures> clips;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 3 + kClipFeatureCount)
            throw DataError(strfmt("malformed cache row at %s:%zu", path.c_str(),
                                   line_no));
        ClipFeatures clip;
        clip.clip_path = fields[0];
        clip.singer_id = fields[1];
        if (!fields[2].empty()) clip.emotion = parse_emotion(fields[2]);
        clip.values.reserve(kClipFeatureCount);
        for (int i = 0; i < kClipFeatureCount; ++i) {
            std::size_t used = 0;
            const double v = std::stod(fields[3 + i], &used);
            if (used == 0)
                throw DataError(strfmt("bad numeric field at %s:%zu",
                                       path.c_str(), line_no));
            clip.values.push_back(v);
        }
        clips.push_back(std::move(clip));
    }
    return clips;
}

}  // namespace prosody
