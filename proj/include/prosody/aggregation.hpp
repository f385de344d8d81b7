// Two-stage feature aggregation: per-frame deltas (34 -> 68 rows),
// mid-term mean/std statistics per segment (-> 136 rows), and averaging
// across segments into one 136-vector per clip.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "prosody/features.hpp"
#include "prosody/taxonomy.hpp"

namespace prosody {

inline constexpr int kClipFeatureCount = 4 * kFrameFeatureCount;  // 136

// Short/mid-term windowing parameters. Mid-term sizes must be whole
// multiples of the short-term step.
struct AggregationParams {
    double st_win = 0.05;
    double st_step = 0.05;
    double mt_win = 1.0;
    double mt_step = 1.0;

    void validate() const {
        if (st_win <= 0 || st_step <= 0 || mt_win <= 0 || mt_step <= 0)
            throw std::invalid_argument("aggregation params must be positive");
        if (mt_win < st_win)
            throw std::invalid_argument("mt_win must be >= st_win");
        const double win_ratio = mt_win / st_step;
        const double step_ratio = mt_step / st_step;
        if (std::abs(win_ratio - std::round(win_ratio)) > 1e-9 ||
            std::abs(step_ratio - std::round(step_ratio)) > 1e-9 ||
            std::round(win_ratio) < 1.0 || std::round(step_ratio) < 1.0)
            throw std::invalid_argument(
                "mt_win and mt_step must be whole multiples of st_step");
    }

    std::size_t segment_frames() const {
        return static_cast<std::size_t>(std::llround(mt_win / st_step));
    }
    std::size_t segment_hop() const {
        return static_cast<std::size_t>(std::llround(mt_step / st_step));
    }
};

// A clip-level feature vector with its provenance. `values` is laid out
// as [mean(row 1..68), std(row 1..68)].
struct ClipFeatures {
    std::vector<double> values;  // length 136
    std::string clip_path;
    std::string singer_id;
    std::optional<Emotion> emotion;
};

// Aggregate feature names for the 136-slot layout:
// mean/std block x base/delta x the 34 short-term names.
inline std::string aggregate_feature_name(int index) {
    const bool is_std = index >= 2 * kFrameFeatureCount;
    int j = index % (2 * kFrameFeatureCount);
    const bool is_delta = j >= kFrameFeatureCount;
    const std::string& base = frame_feature_names()[j % kFrameFeatureCount];
    std::string name = is_std ? "std_" : "mean_";
    if (is_delta) name += "delta_";
    return name + base;
}

// 34xT feature matrix -> 68xT with per-row finite differences appended;
// the first column's deltas are all zero.
inline Matrix append_deltas(const Matrix& features) {
    const std::size_t t_count = features.cols();
    if (features.rows() != kFrameFeatureCount || t_count == 0)
        throw std::invalid_argument("append_deltas: expected 34 x T, T >= 1");
    Matrix out(2 * kFrameFeatureCount, t_count);
    for (std::size_t r = 0; r < kFrameFeatureCount; ++r) {
        for (std::size_t t = 0; t < t_count; ++t) {
            out.at(r, t) = features.at(r, t);
            out.at(r + kFrameFeatureCount, t) =
                t == 0 ? 0.0 : features.at(r, t) - features.at(r, t - 1);
        }
    }
    return out;
}

namespace detail {

// Mid-term segment boundaries [begin, end) over T frames. Full segments
// follow length L and hop H; a trailing partial segment is kept only
// when it spans at least L/2 frames. A clip too short for any full
// segment still yields one segment with whatever frames exist.
inline std::vector<std::pair<std::size_t, std::size_t>> segment_bounds(
    std::size_t t_count, std::size_t seg_len, std::size_t hop) {
    std::vector<std::pair<std::size_t, std::size_t>> bounds;
    if (t_count >= seg_len) {
        const std::size_t full = (t_count - seg_len) / hop + 1;
        for (std::size_t i = 0; i < full; ++i)
            bounds.push_back({i * hop, i * hop + seg_len});
        const std::size_t tail_start = full * hop;
        if (tail_start < t_count &&
            2 * (t_count - tail_start) >= seg_len)
            bounds.push_back({tail_start, t_count});
    } else if (t_count > 0) {
        bounds.push_back({0, t_count});
    }
    return bounds;
}

}  // namespace detail

// 68xT short-term matrix -> 136xM mid-term matrix; per segment, rows
// 0..67 are per-row means and rows 68..135 per-row population standard
// deviations.
inline Matrix midterm_stats(const Matrix& st, const AggregationParams& params) {
    params.validate();
    if (st.rows() != 2 * kFrameFeatureCount || st.cols() == 0)
        throw std::invalid_argument("midterm_stats: expected 68 x T, T >= 1");
    const auto bounds =
        detail::segment_bounds(st.cols(), params.segment_frames(),
                               params.segment_hop());
    Matrix out(2 * st.rows(), bounds.size());
    for (std::size_t m = 0; m < bounds.size(); ++m) {
        const auto [begin, end] = bounds[m];
        const double n = static_cast<double>(end - begin);
        for (std::size_t r = 0; r < st.rows(); ++r) {
            double mean = 0.0;
            for (std::size_t t = begin; t < end; ++t) mean += st.at(r, t);
            mean /= n;
            double var = 0.0;
            for (std::size_t t = begin; t < end; ++t) {
                const double d = st.at(r, t) - mean;
                var += d * d;
            }
            out.at(r, m) = mean;
            out.at(r + st.rows(), m) = std::sqrt(var / n);
        }
    }
    return out;
}

// Element-wise mean over the mid-term segments.
inline std::vector<double> clip_vector(const Matrix& mt) {
    if (mt.rows() != kClipFeatureCount || mt.cols() == 0)
        throw std::invalid_argument("clip_vector: expected 136 x M, M >= 1");
    std::vector<double> out(mt.rows(), 0.0);
    for (std::size_t r = 0; r < mt.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t m = 0; m < mt.cols(); ++m) acc += mt.at(r, m);
        out[r] = acc / static_cast<double>(mt.cols());
    }
    return out;
}

// 34xT per-frame features of a clip, columns in frame order.
inline Matrix extract_frame_matrix(const AudioClip& clip,
                                   const AggregationParams& params) {
    const FrameSequence frames = frame_signal(clip, params.st_win, params.st_step);
    const FrameExtractor extractor(clip.sample_rate, frames.frame_len);
    Matrix features(kFrameFeatureCount, frames.count());
    Spectrum prev;
    for (std::size_t t = 0; t < frames.count(); ++t) {
        auto [vec, spec] =
            extractor.extract(frames.frames.row(t), t == 0 ? nullptr : &prev);
        for (int r = 0; r < kFrameFeatureCount; ++r) features.at(r, t) = vec[r];
        prev = std::move(spec);
    }
    return features;
}

// Full pipeline: framing -> 34 features -> deltas -> mid-term stats ->
// clip vector. Deterministic for a given clip and parameters.
inline std::vector<double> extract_clip(const AudioClip& clip,
                                        const AggregationParams& params = {}) {
    params.validate();
    return clip_vector(midterm_stats(append_deltas(
                           extract_frame_matrix(clip, params)),
                       params));
}

}  // namespace prosody
