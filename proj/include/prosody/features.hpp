// The 34 short-term features, computed per 50 ms frame:
//
//   index  0..7   zcr, energy, energy_entropy, spectral_centroid,
//                 spectral_spread, spectral_entropy, spectral_flux,
//                 spectral_rolloff
//   index  8..20  mfcc_1 .. mfcc_13
//   index 21..32  chroma_1 .. chroma_12
//   index 33      chroma_deviation
//
// The order is fixed; selection rankings and the aggregate feature
// naming depend on it.
#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "prosody/dsp.hpp"

namespace prosody {

inline constexpr int kFrameFeatureCount = 34;
inline constexpr int kMfccCount = 13;
inline constexpr int kChromaClasses = 12;
inline constexpr std::size_t kMelFilterCount = 40;
inline constexpr int kEnergyEntropySubframes = 10;
inline constexpr int kSpectralEntropyBlocks = 10;
inline constexpr double kRolloffFraction = 0.90;
inline constexpr double kMfccLogFloor = 1e-10;

using FrameFeatureVector = std::array<double, kFrameFeatureCount>;

inline const std::array<std::string, kFrameFeatureCount>& frame_feature_names() {
    static const std::array<std::string, kFrameFeatureCount> names = [] {
        std::array<std::string, kFrameFeatureCount> n;
        n[0] = "zcr";
        n[1] = "energy";
        n[2] = "energy_entropy";
        n[3] = "spectral_centroid";
        n[4] = "spectral_spread";
        n[5] = "spectral_entropy";
        n[6] = "spectral_flux";
        n[7] = "spectral_rolloff";
        for (int i = 0; i < kMfccCount; ++i) n[8 + i] = "mfcc_" + std::to_string(i + 1);
        for (int i = 0; i < kChromaClasses; ++i)
            n[21 + i] = "chroma_" + std::to_string(i + 1);
        n[33] = "chroma_deviation";
        return n;
    }();
    return names;
}

// Sign-change rate; sign(0) counts as positive.
inline double zcr(std::span<const double> frame) {
    if (frame.size() < 2) throw std::invalid_argument("zcr: frame too short");
    auto sgn = [](double v) { return v >= 0.0 ? 1 : -1; };
    std::size_t crossings = 0;
    for (std::size_t i = 1; i < frame.size(); ++i)
        if (sgn(frame[i]) != sgn(frame[i - 1])) ++crossings;
    return static_cast<double>(crossings) / static_cast<double>(frame.size() - 1);
}

inline double short_time_energy(std::span<const double> frame) {
    double acc = 0.0;
    for (double s : frame) acc += s * s;
    return acc / static_cast<double>(frame.size());
}

// Shannon entropy (base 2) of the energy distribution over n_sub equal
// sub-frames; the remainder after equal division is dropped. A silent
// frame falls back to the uniform distribution.
inline double energy_entropy(std::span<const double> frame,
                             int n_sub = kEnergyEntropySubframes) {
    if (static_cast<int>(frame.size()) < n_sub)
        throw std::invalid_argument("energy_entropy: frame shorter than n_sub");
    const std::size_t sub_len = frame.size() / static_cast<std::size_t>(n_sub);
    std::vector<double> sub_energy(n_sub, 0.0);
    double total = 0.0;
    for (int j = 0; j < n_sub; ++j) {
        double e = 0.0;
        for (std::size_t i = 0; i < sub_len; ++i) {
            const double s = frame[static_cast<std::size_t>(j) * sub_len + i];
            e += s * s;
        }
        sub_energy[j] = e;
        total += e;
    }
    double entropy = 0.0;
    for (int j = 0; j < n_sub; ++j) {
        const double p = total > 0.0 ? sub_energy[j] / total : 1.0 / n_sub;
        if (p > 0.0) entropy -= p * std::log2(p);
    }
    return entropy;
}

// First moment and square-rooted second central moment of the power
// spectrum; both zero when the spectrum carries no energy.
inline std::pair<double, double> spectral_centroid_spread(const Spectrum& spec) {
    double total = 0.0, weighted = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double w = spec.magnitudes[k] * spec.magnitudes[k];
        total += w;
        weighted += static_cast<double>(k) * spec.bin_hz * w;
    }
    if (total <= 0.0) return {0.0, 0.0};
    const double centroid = weighted / total;
    double var = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double w = spec.magnitudes[k] * spec.magnitudes[k];
        const double d = static_cast<double>(k) * spec.bin_hz - centroid;
        var += d * d * w;
    }
    return {centroid, std::sqrt(var / total)};
}

// Entropy (base 2) of the power spectrum over n_blocks contiguous equal
// blocks; remainder bins are dropped, zero spectra fall back to uniform.
inline double spectral_entropy(const Spectrum& spec,
                               int n_blocks = kSpectralEntropyBlocks) {
    if (static_cast<int>(spec.size()) < n_blocks)
        throw std::invalid_argument("spectral_entropy: too few bins");
    const std::size_t block_len = spec.size() / static_cast<std::size_t>(n_blocks);
    std::vector<double> block_energy(n_blocks, 0.0);
    double total = 0.0;
    for (int j = 0; j < n_blocks; ++j) {
        double e = 0.0;
        for (std::size_t i = 0; i < block_len; ++i) {
            const double m =
                spec.magnitudes[static_cast<std::size_t>(j) * block_len + i];
            e += m * m;
        }
        block_energy[j] = e;
        total += e;
    }
    double entropy = 0.0;
    for (int j = 0; j < n_blocks; ++j) {
        const double p = total > 0.0 ? block_energy[j] / total : 1.0 / n_blocks;
        if (p > 0.0) entropy -= p * std::log2(p);
    }
    return entropy;
}

// Euclidean distance between L1-normalized magnitude spectra. The L1
// normalization keeps flux a change detector rather than a loudness
// detector. The first frame of a clip uses itself as predecessor.
inline double spectral_flux(const Spectrum& spec, const Spectrum& prev) {
    if (spec.size() != prev.size())
        throw std::invalid_argument("spectral_flux: spectrum length mismatch");
    double sum_cur = 0.0, sum_prev = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        sum_cur += spec.magnitudes[k];
        sum_prev += prev.magnitudes[k];
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double a = sum_cur > 0.0 ? spec.magnitudes[k] / sum_cur
                                       : spec.magnitudes[k];
        const double b = sum_prev > 0.0 ? prev.magnitudes[k] / sum_prev
                                        : prev.magnitudes[k];
        acc += (a - b) * (a - b);
    }
    return std::sqrt(acc);
}

// Smallest bin frequency under which `fraction` of the spectral power
// lies; 0 for an all-zero spectrum.
inline double spectral_rolloff(const Spectrum& spec,
                               double fraction = kRolloffFraction) {
    if (fraction <= 0.0 || fraction >= 1.0)
        throw std::invalid_argument("spectral_rolloff: fraction must be in (0,1)");
    double total = 0.0;
    for (double m : spec.magnitudes) total += m * m;
    if (total <= 0.0) return 0.0;
    const double target = fraction * total;
    double acc = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        acc += spec.magnitudes[k] * spec.magnitudes[k];
        if (acc >= target) return static_cast<double>(k) * spec.bin_hz;
    }
    return static_cast<double>(spec.size() - 1) * spec.bin_hz;
}

// 13 cepstral coefficients: orthonormal DCT-II of log mel filter energies.
inline std::vector<double> mfcc(const Spectrum& spec, const MelFilterBank& bank) {
    if (bank.bin_count() != spec.size())
        throw std::invalid_argument("mfcc: filterbank built for another size");
    std::vector<double> log_energies(bank.filter_count());
    for (std::size_t j = 0; j < bank.filter_count(); ++j) {
        double e = 0.0;
        const auto row = bank.weights.row(j);
        for (std::size_t k = 0; k < spec.size(); ++k)
            e += row[k] * spec.magnitudes[k] * spec.magnitudes[k];
        log_energies[j] = std::log(e + kMfccLogFloor);
    }
    return dct_ii(log_energies, kMfccCount);
}

// 12-class chroma energies (normalized to sum 1 over assigned energy)
// plus their population standard deviation.
inline std::pair<std::array<double, kChromaClasses>, double> chroma_features(
    const Spectrum& spec, const ChromaMap& map) {
    if (map.bin_count() != spec.size())
        throw std::invalid_argument("chroma_features: map built for another size");
    std::array<double, kChromaClasses> chroma{};
    double total = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const int cls = map.pitch_class[k];
        if (cls < 0) continue;
        const double p = spec.magnitudes[k] * spec.magnitudes[k];
        chroma[static_cast<std::size_t>(cls)] += p;
        total += p;
    }
    if (total > 0.0)
        for (double& c : chroma) c /= total;

    double mean = 0.0;
    for (double c : chroma) mean += c;
    mean /= kChromaClasses;
    double var = 0.0;
    for (double c : chroma) var += (c - mean) * (c - mean);
    return {chroma, std::sqrt(var / kChromaClasses)};
}

// Per-frame extractor holding the immutable tables (window, mel bank,
// chroma map) for one (sample_rate, frame_len) configuration. Instances
// are safe to share across threads.
class FrameExtractor {
  public:
    FrameExtractor(int sample_rate, std::size_t frame_len)
        : sample_rate_(sample_rate),
          window_(hamming_window(frame_len)),
          bank_(build_mel_filterbank(sample_rate, frame_len / 2 + 1,
                                     kMelFilterCount)),
          chroma_map_(build_chroma_map(sample_rate, frame_len / 2 + 1)) {}

    // Computes the 34 features of one frame. `prev` is the previous
    // frame's spectrum (nullptr for the first frame, making flux 0); the
    // returned spectrum feeds the next frame's flux.
    std::pair<FrameFeatureVector, Spectrum> extract(
        std::span<const double> frame, const Spectrum* prev) const {
        Spectrum spec = magnitude_spectrum(frame, window_, sample_rate_);
        FrameFeatureVector out{};
        out[0] = zcr(frame);
        out[1] = short_time_energy(frame);
        out[2] = energy_entropy(frame);
        const auto [centroid, spread] = spectral_centroid_spread(spec);
        out[3] = centroid;
        out[4] = spread;
        out[5] = spectral_entropy(spec);
        out[6] = spectral_flux(spec, prev ? *prev : spec);
        out[7] = spectral_rolloff(spec);
        const auto coeffs = mfcc(spec, bank_);
        for (int i = 0; i < kMfccCount; ++i) out[8 + i] = coeffs[i];
        const auto [chroma, deviation] = chroma_features(spec, chroma_map_);
        for (int i = 0; i < kChromaClasses; ++i) out[21 + i] = chroma[i];
        out[33] = deviation;
        return {out, std::move(spec)};
    }

    const MelFilterBank& filterbank() const { return bank_; }
    const ChromaMap& chroma_map() const { return chroma_map_; }

  private:
    int sample_rate_;
    std::vector<double> window_;
    MelFilterBank bank_;
    ChromaMap chroma_map_;
};

}  // namespace prosody
