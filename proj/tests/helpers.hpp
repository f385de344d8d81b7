// Shared test utilities: independent oracles (naive DFT/DCT, a minimal
// reference WAV writer), signal synthesis, synthetic datasets and
// temporary directories. Oracle code here must stay independent of the
// library implementation paths it checks.
#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "prosody/audio.hpp"
#include "prosody/classify/common.hpp"

namespace testutil {

// O(n^2) reference DFT.
inline std::vector<std::complex<double>> naive_dft(
    const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                               static_cast<double>(i) / static_cast<double>(n);
            acc += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

// One-sided magnitude spectrum of a Hamming-windowed frame via the
// naive DFT; reference for all spectral features.
inline std::vector<double> naive_magnitudes(const std::vector<double>& frame) {
    const std::size_t n = frame.size();
    std::vector<double> windowed(n);
    for (std::size_t i = 0; i < n; ++i)
        windowed[i] = frame[i] * (0.54 - 0.46 * std::cos(2.0 * std::numbers::pi *
                                                         static_cast<double>(i) /
                                                         static_cast<double>(n - 1)));
    const auto bins = naive_dft(windowed);
    std::vector<double> mags(n / 2 + 1);
    for (std::size_t k = 0; k < mags.size(); ++k) mags[k] = std::abs(bins[k]);
    return mags;
}

// O(n^2) orthonormal DCT-II, written as the plain double loop.
inline std::vector<double> naive_dct_ii(const std::vector<double>& x,
                                        std::size_t n_out) {
    const std::size_t n = x.size();
    std::vector<double> out(n_out, 0.0);
    for (std::size_t k = 0; k < n_out; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += x[i] * std::cos(std::numbers::pi / static_cast<double>(n) *
                                   (static_cast<double>(i) + 0.5) *
                                   static_cast<double>(k));
        const double s = k == 0 ? std::sqrt(1.0 / static_cast<double>(n))
                                : std::sqrt(2.0 / static_cast<double>(n));
        out[k] = acc * s;
    }
    return out;
}

inline std::vector<double> make_sine(double freq_hz, int sample_rate,
                                     double seconds, double amplitude = 1.0,
                                     double phase = 0.0) {
    const std::size_t n =
        static_cast<std::size_t>(std::llround(seconds * sample_rate));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz *
                                          static_cast<double>(i) / sample_rate +
                                      phase);
    return out;
}

inline prosody::AudioClip make_clip(std::vector<double> samples,
                                    int sample_rate,
                                    std::string path = "synthetic") {
    prosody::AudioClip clip;
    clip.samples = std::move(samples);
    clip.sample_rate = sample_rate;
    clip.source_path = std::move(path);
    return clip;
}

// Minimal independent 16-bit PCM WAV writer (supports interleaved
// multi-channel); used to test the library's reader against a second
// implementation.
inline void reference_wav_int16(const std::string& path,
                                const std::vector<std::int16_t>& interleaved,
                                int sample_rate, int channels) {
    std::ofstream out(path, std::ios::binary);
    auto w32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
    auto w16 = [&](std::uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };
    const std::uint32_t data_len =
        static_cast<std::uint32_t>(interleaved.size() * 2);
    out.write("RIFF", 4);
    w32(36 + data_len);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    w32(16);
    w16(1);
    w16(static_cast<std::uint16_t>(channels));
    w32(static_cast<std::uint32_t>(sample_rate));
    w32(static_cast<std::uint32_t>(sample_rate * channels * 2));
    w16(static_cast<std::uint16_t>(channels * 2));
    w16(16);
    out.write("data", 4);
    w32(data_len);
    for (std::int16_t s : interleaved) out.write(reinterpret_cast<char*>(&s), 2);
}

class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("prosody_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& rel = "") const {
        return rel.empty() ? path_.string() : (path_ / rel).string();
    }

  private:
    std::filesystem::path path_;
};

// Brute-force KNN oracle: recomputes standardization and the documented
// neighbor/vote/tie rules from scratch, independent of the library path.
inline int knn_scan_oracle(const prosody::LabeledSet& train, int k,
                           const std::vector<double>& query) {
    const std::size_t n = train.size(), d = train.dim();
    std::vector<double> mean(d, 0.0), sd(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += train.x.at(i, j);
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = train.x.at(i, j) - mean[j];
            sd[j] += diff * diff;
        }
    for (double& s : sd) {
        s = std::sqrt(s / static_cast<double>(n));
        if (s == 0.0) s = 1.0;
    }

    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double a = (query[j] - mean[j]) / sd[j];
            const double b = (train.x.at(i, j) - mean[j]) / sd[j];
            acc += (a - b) * (a - b);
        }
        dist[i] = {acc, i};
    }
    std::sort(dist.begin(), dist.end());

    std::vector<int> votes(train.class_count, 0);
    std::vector<double> summed(train.class_count, 0.0);
    for (int i = 0; i < k; ++i) {
        votes[train.y[dist[static_cast<std::size_t>(i)].second]] += 1;
        summed[train.y[dist[static_cast<std::size_t>(i)].second]] +=
            std::sqrt(dist[static_cast<std::size_t>(i)].first);
    }
    int best = -1;
    for (int c = 0; c < train.class_count; ++c) {
        if (votes[c] == 0) continue;
        if (best < 0 || votes[c] > votes[best] ||
            (votes[c] == votes[best] && summed[c] < summed[best]))
            best = c;
    }
    return best;
}

// Gaussian blob dataset around the given class centers.
inline prosody::LabeledSet make_blobs(
    const std::vector<std::vector<double>>& centers, std::size_t per_class,
    double noise, std::uint64_t seed) {
    prosody::LabeledSet set;
    set.class_count = static_cast<int>(centers.size());
    const std::size_t d = centers[0].size();
    set.x = prosody::Matrix(per_class * centers.size(), d);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, noise);
    std::size_t row = 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (std::size_t i = 0; i < per_class; ++i, ++row) {
            for (std::size_t j = 0; j < d; ++j)
                set.x.at(row, j) = centers[c][j] + normal(gen);
            set.y.push_back(static_cast<int>(c));
        }
    }
    return set;
}

// Four-class synthetic audio dataset laid out as a scan_dataset tree:
// root/<singer>/<emotion>/<clip>.wav, one acoustic archetype per class.
//   anger   -> gated noise bursts
//   joy     -> steady high tone
//   sadness -> low tone with tremolo
//   love    -> rising chirp
inline void generate_audio_dataset(const std::filesystem::path& root,
                                   std::size_t clips_per_class,
                                   std::uint64_t seed,
                                   const std::string& singer = "s1") {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int sr = prosody::kCanonicalSampleRate;
    const char* emotions[4] = {"anger", "joy", "sadness", "love"};

    for (int cls = 0; cls < 4; ++cls) {
        const auto dir = root / singer / emotions[cls];
        std::filesystem::create_directories(dir);
        for (std::size_t i = 0; i < clips_per_class; ++i) {
            const double seconds = 1.2 + 1.3 * unit(gen);
            const double amp = 0.35 + 0.4 * unit(gen);
            const std::size_t n =
                static_cast<std::size_t>(std::llround(seconds * sr));
            std::vector<double> s(n, 0.0);
            switch (cls) {
                case 0: {  // noise bursts, gated at ~4 Hz
                    const double gate_hz = 3.0 + 2.0 * unit(gen);
                    for (std::size_t t = 0; t < n; ++t) {
                        const double gate =
                            std::sin(2.0 * std::numbers::pi * gate_hz * t / sr) >
                                    0.0
                                ? 1.0
                                : 0.05;
                        s[t] = amp * gate * (2.0 * unit(gen) - 1.0);
                    }
                    break;
                }
                case 1: {  // steady high tone
                    const double f = 1600.0 + 500.0 * unit(gen);
                    for (std::size_t t = 0; t < n; ++t)
                        s[t] = amp * std::sin(2.0 * std::numbers::pi * f * t / sr);
                    break;
                }
                case 2: {  // low tone with tremolo
                    const double f = 200.0 + 60.0 * unit(gen);
                    const double trem_hz = 5.0 + 2.0 * unit(gen);
                    for (std::size_t t = 0; t < n; ++t) {
                        const double trem =
                            0.5 + 0.5 * std::sin(2.0 * std::numbers::pi *
                                                 trem_hz * t / sr);
                        s[t] = amp * trem *
                               std::sin(2.0 * std::numbers::pi * f * t / sr);
                    }
                    break;
                }
                default: {  // up-chirp
                    const double f0 = 250.0 + 100.0 * unit(gen);
                    const double f1 = 2600.0 + 600.0 * unit(gen);
                    double phase = 0.0;
                    for (std::size_t t = 0; t < n; ++t) {
                        const double f =
                            f0 + (f1 - f0) * static_cast<double>(t) /
                                     static_cast<double>(n);
                        phase += 2.0 * std::numbers::pi * f / sr;
                        s[t] = amp * std::sin(phase);
                    }
                    break;
                }
            }
            prosody::write_wav(
                (dir / ("clip_" + std::to_string(i) + ".wav")).string(),
                make_clip(std::move(s), sr));
        }
    }
}

}  // namespace testutil
