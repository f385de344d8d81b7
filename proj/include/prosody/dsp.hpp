// Framing, windowing, spectra, mel filterbank, DCT-II and pitch-class
// mapping: the machinery beneath the short-term features.
//
// The FFT runs at exact frame length (800 samples for 50 ms at 16 kHz,
// giving bin_hz = 20 exactly): radix-2 for powers of two, Bluestein's
// chirp-z re-expression for everything else.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "prosody/audio.hpp"
#include "prosody/common.hpp"

namespace prosody {

namespace dsp {

inline bool is_power_of_two(std::size_t n) { return n && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey; n must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang =
            (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

// Arbitrary-length DFT via Bluestein: X_k = b*_k sum_n (x_n b*_n) b_{k-n},
// with b_m = exp(i pi m^2 / n); the convolution runs over a power-of-two
// FFT of length >= 2n-1. Phases use m^2 mod 2n to keep the angles small.
inline std::vector<std::complex<double>> fft_bluestein(
    std::span<const std::complex<double>> x) {
    const std::size_t n = x.size();
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;

    std::vector<std::complex<double>> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = std::numbers::pi * static_cast<double>(k2) /
                           static_cast<double>(n);
        chirp[k] = {std::cos(ang), std::sin(ang)};
    }

    std::vector<std::complex<double>> a(m), b(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * std::conj(chirp[k]);
    b[0] = chirp[0];
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = chirp[k];

    fft_radix2(a, false);
    fft_radix2(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_radix2(a, true);

    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * std::conj(chirp[k]);
    return out;
}

}  // namespace dsp

// Complex DFT of any length >= 1.
inline std::vector<std::complex<double>> fft(
    std::span<const std::complex<double>> x) {
    if (x.empty()) return {};
    if (dsp::is_power_of_two(x.size())) {
        std::vector<std::complex<double>> a(x.begin(), x.end());
        dsp::fft_radix2(a, false);
        return a;
    }
    return dsp::fft_bluestein(x);
}

inline std::vector<std::complex<double>> fft_real(std::span<const double> x) {
    std::vector<std::complex<double>> cx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) cx[i] = {x[i], 0.0};
    return fft(cx);
}

// Symmetric Hamming window.
inline std::vector<double> hamming_window(std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (n < 2) return w;
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi *
                                      static_cast<double>(i) /
                                      static_cast<double>(n - 1));
    return w;
}

// Contiguous frames of a clip; row t is frame t. The trailing remainder
// shorter than one window is dropped.
struct FrameSequence {
    Matrix frames;  // T x frame_len
    std::size_t frame_len = 0;
    std::size_t step = 0;
    int sample_rate = 0;

    std::size_t count() const { return frames.rows(); }
};

inline FrameSequence frame_signal(const AudioClip& clip, double win_s,
                                  double step_s) {
    if (win_s <= 0.0 || step_s <= 0.0)
        throw std::invalid_argument("frame_signal: window and step must be > 0");
    const std::size_t frame_len =
        static_cast<std::size_t>(std::llround(win_s * clip.sample_rate));
    const std::size_t step =
        static_cast<std::size_t>(std::llround(step_s * clip.sample_rate));
    if (frame_len < 2 || step == 0)
        throw std::invalid_argument("frame_signal: degenerate window or step");
    if (clip.samples.size() < frame_len)
        throw DataError(strfmt("clip shorter than one %.0f ms window: %s",
                               win_s * 1000.0, clip.source_path.c_str()));

    const std::size_t t_count = (clip.samples.size() - frame_len) / step + 1;
    FrameSequence seq;
    seq.frame_len = frame_len;
    seq.step = step;
    seq.sample_rate = clip.sample_rate;
    seq.frames = Matrix(t_count, frame_len);
    for (std::size_t t = 0; t < t_count; ++t)
        for (std::size_t i = 0; i < frame_len; ++i)
            seq.frames.at(t, i) = clip.samples[t * step + i];
    return seq;
}

// One-sided magnitude spectrum of a Hamming-windowed frame: |X[k]| for
// k = 0..floor(N/2), bin_hz = sample_rate / N.
struct Spectrum {
    std::vector<double> magnitudes;
    double bin_hz = 0.0;

    std::size_t size() const { return magnitudes.size(); }
};

inline Spectrum magnitude_spectrum(std::span<const double> frame,
                                   int sample_rate) {
    const std::size_t n = frame.size();
    if (n < 2) throw std::invalid_argument("magnitude_spectrum: frame too short");
    const std::vector<double> window = hamming_window(n);
    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = {frame[i] * window[i], 0.0};
    const auto bins = fft(buf);

    Spectrum spec;
    spec.bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n);
    spec.magnitudes.resize(n / 2 + 1);
    for (std::size_t k = 0; k < spec.magnitudes.size(); ++k)
        spec.magnitudes[k] = std::abs(bins[k]);
    return spec;
}

// Windowed variant used when the caller extracts many frames of the same
// length and wants to reuse the window table.
inline Spectrum magnitude_spectrum(std::span<const double> frame,
                                   std::span<const double> window,
                                   int sample_rate) {
    const std::size_t n = frame.size();
    if (n < 2 || window.size() != n)
        throw std::invalid_argument("magnitude_spectrum: bad frame/window size");
    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = {frame[i] * window[i], 0.0};
    const auto bins = fft(buf);

    Spectrum spec;
    spec.bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n);
    spec.magnitudes.resize(n / 2 + 1);
    for (std::size_t k = 0; k < spec.magnitudes.size(); ++k)
        spec.magnitudes[k] = std::abs(bins[k]);
    return spec;
}

inline double hz_to_mel(double hz) {
    return 2595.0 * std::log10(1.0 + hz / 700.0);
}

inline double mel_to_hz(double mel) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// Triangular mel filterbank with unit-peak filters, centers equally
// spaced in mel between 0 Hz and Nyquist, adjacent filters overlapping at
// each other's centers. n_bins is the one-sided spectrum length of an
// even-length frame, so bin_hz = sample_rate / (2 * (n_bins - 1)).
struct MelFilterBank {
    Matrix weights;  // n_filters x n_bins
    std::vector<double> center_hz;
    std::vector<double> edges_hz;  // n_filters + 2 triangle edge points

    std::size_t filter_count() const { return weights.rows(); }
    std::size_t bin_count() const { return weights.cols(); }

    // Triangle response of filter j at an arbitrary frequency.
    double weight_at(std::size_t j, double f) const {
        const double lo = edges_hz[j], mid = edges_hz[j + 1], hi = edges_hz[j + 2];
        if (f == mid) return 1.0;
        if (f > lo && f < mid) return (f - lo) / (mid - lo);
        if (f > mid && f < hi) return (hi - f) / (hi - mid);
        return 0.0;
    }
};

inline MelFilterBank build_mel_filterbank(int sample_rate, std::size_t n_bins,
                                          std::size_t n_filters) {
    if (n_filters < 13)
        throw std::invalid_argument("build_mel_filterbank: need >= 13 filters");
    if (n_bins < n_filters)
        throw std::invalid_argument("build_mel_filterbank: n_bins < n_filters");

    const double bin_hz =
        static_cast<double>(sample_rate) / (2.0 * static_cast<double>(n_bins - 1));
    const double nyquist = sample_rate / 2.0;
    const double mel_max = hz_to_mel(nyquist);

    // n_filters + 2 edge points, equally spaced in mel.
    std::vector<double> edges_hz(n_filters + 2);
    for (std::size_t j = 0; j < edges_hz.size(); ++j)
        edges_hz[j] = mel_to_hz(mel_max * static_cast<double>(j) /
                                static_cast<double>(n_filters + 1));

    MelFilterBank bank;
    bank.weights = Matrix(n_filters, n_bins);
    bank.center_hz.assign(edges_hz.begin() + 1, edges_hz.begin() + 1 + n_filters);
    bank.edges_hz = edges_hz;
    for (std::size_t j = 0; j < n_filters; ++j)
        for (std::size_t k = 0; k < n_bins; ++k)
            bank.weights.at(j, k) =
                bank.weight_at(j, static_cast<double>(k) * bin_hz);
    return bank;
}

// Orthonormal DCT-II, first n_out coefficients.
inline std::vector<double> dct_ii(std::span<const double> values,
                                  std::size_t n_out) {
    const std::size_t n = values.size();
    if (n_out > n) throw std::invalid_argument("dct_ii: n_out > n");
    std::vector<double> out(n_out, 0.0);
    const double scale0 = std::sqrt(1.0 / static_cast<double>(n));
    const double scale = std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < n_out; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += values[i] *
                   std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) *
                            static_cast<double>(k) / (2.0 * static_cast<double>(n)));
        out[k] = acc * (k == 0 ? scale0 : scale);
    }
    return out;
}

// Pitch-class assignment per spectral bin: round(12 log2(f / 440)) mod 12
// with class 0 = A; bins below 27.5 Hz (A0) stay unassigned (-1).
struct ChromaMap {
    std::vector<int> pitch_class;  // per bin; -1 = unassigned

    std::size_t bin_count() const { return pitch_class.size(); }
};

inline ChromaMap build_chroma_map(int sample_rate, std::size_t n_bins) {
    if (n_bins < 2)
        throw std::invalid_argument("build_chroma_map: need >= 2 bins");
    const double bin_hz =
        static_cast<double>(sample_rate) / (2.0 * static_cast<double>(n_bins - 1));
    ChromaMap map;
    map.pitch_class.resize(n_bins, -1);
    for (std::size_t k = 0; k < n_bins; ++k) {
        const double f = static_cast<double>(k) * bin_hz;
        if (f < 27.5) continue;
        const long cls = std::lround(12.0 * std::log2(f / 440.0));
        map.pitch_class[k] = static_cast<int>(((cls % 12) + 12) % 12);
    }
    return map;
}

}  // namespace prosody
