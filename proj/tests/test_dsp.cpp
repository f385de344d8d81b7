// DSP core tests: framing arithmetic, FFT against the naive DFT oracle,
// mel filterbank geometry, DCT-II against the double-loop oracle, and
// the chroma pitch-class map.
#include "catch_amalgamated.hpp"
#include "helpers.hpp"
#include "prosody/dsp.hpp"

#include <random>

using namespace prosody;
using Catch::Approx;

TEST_CASE("frame_signal frame counts follow the floor rule", "[dsp]") {
    SECTION("5.0 s at 16 kHz gives 100 frames of 800 samples") {
        const auto clip =
            testutil::make_clip(std::vector<double>(80000, 0.1), 16000);
        const FrameSequence seq = frame_signal(clip, 0.05, 0.05);
        REQUIRE(seq.count() == 100);
        REQUIRE(seq.frame_len == 800);
    }
    SECTION("1.0 s gives 20 frames") {
        const auto clip =
            testutil::make_clip(std::vector<double>(16000, 0.1), 16000);
        REQUIRE(frame_signal(clip, 0.05, 0.05).count() == 20);
    }
    SECTION("a 24 ms tail is dropped") {
        const auto clip =
            testutil::make_clip(std::vector<double>(80384, 0.1), 16000);
        REQUIRE(frame_signal(clip, 0.05, 0.05).count() == 100);
    }
    SECTION("clip shorter than one window is an error") {
        const auto clip =
            testutil::make_clip(std::vector<double>(700, 0.1), 16000);
        REQUIRE_THROWS_AS(frame_signal(clip, 0.05, 0.05), DataError);
    }
}

TEST_CASE("framing partitions the consumed samples when step == window",
          "[dsp][property]") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> samples(16000 + 137);  // deliberately uneven tail
    for (double& s : samples) s = unit(gen);
    const auto clip = testutil::make_clip(samples, 16000);
    const FrameSequence seq = frame_signal(clip, 0.05, 0.05);

    std::vector<double> reassembled;
    for (std::size_t t = 0; t < seq.count(); ++t) {
        const auto row = seq.frames.row(t);
        reassembled.insert(reassembled.end(), row.begin(), row.end());
    }
    REQUIRE(reassembled.size() == seq.count() * seq.frame_len);
    for (std::size_t i = 0; i < reassembled.size(); ++i)
        REQUIRE(reassembled[i] == samples[i]);
}

TEST_CASE("fft matches the naive DFT oracle", "[dsp][oracle]") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t n : {2u, 3u, 8u, 17u, 100u, 256u, 800u, 1023u, 1024u}) {
        std::vector<double> x(n);
        for (double& v : x) v = unit(gen);
        const auto oracle = testutil::naive_dft(x);
        const auto fast = fft_real(x);
        REQUIRE(fast.size() == n);
        double ref_norm = 0.0;
        for (const auto& v : oracle) ref_norm = std::max(ref_norm, std::abs(v));
        for (std::size_t k = 0; k < n; ++k)
            REQUIRE(std::abs(fast[k] - oracle[k]) / ref_norm < 1e-9);
    }
}

TEST_CASE("magnitude_spectrum basics", "[dsp]") {
    SECTION("all-zero frame gives all-zero magnitudes") {
        const std::vector<double> frame(800, 0.0);
        const Spectrum spec = magnitude_spectrum(frame, 16000);
        REQUIRE(spec.size() == 401);
        REQUIRE(spec.bin_hz == Approx(20.0));
        for (double m : spec.magnitudes) REQUIRE(m == 0.0);
    }
    SECTION("constant frame concentrates energy at DC") {
        const std::vector<double> frame(800, 0.7);
        const Spectrum spec = magnitude_spectrum(frame, 16000);
        for (std::size_t k = 2; k < spec.size(); ++k)
            REQUIRE(spec.magnitudes[k] < 0.01 * spec.magnitudes[0]);
        // Cross-check the windowed constant against the oracle.
        const auto oracle = testutil::naive_magnitudes(frame);
        for (std::size_t k = 0; k < spec.size(); ++k)
            REQUIRE(spec.magnitudes[k] == Approx(oracle[k]).margin(1e-9));
    }
    SECTION("1 kHz sine at 16 kHz peaks in bin 50") {
        const auto frame = testutil::make_sine(1000.0, 16000, 0.05);
        const Spectrum spec = magnitude_spectrum(frame, 16000);
        std::size_t argmax = 0;
        for (std::size_t k = 1; k < spec.size(); ++k)
            if (spec.magnitudes[k] > spec.magnitudes[argmax]) argmax = k;
        REQUIRE(argmax == 50);
        const auto oracle = testutil::naive_magnitudes(frame);
        for (std::size_t k = 0; k < spec.size(); ++k)
            REQUIRE(spec.magnitudes[k] == Approx(oracle[k]).margin(1e-8));
    }
}

TEST_CASE("mel filterbank geometry", "[dsp]") {
    const MelFilterBank bank = build_mel_filterbank(16000, 401, 40);

    SECTION("the mel map evaluates correctly at 700 Hz") {
        REQUIRE(hz_to_mel(700.0) == Approx(2595.0 * std::log10(2.0)).epsilon(1e-12));
        REQUIRE(hz_to_mel(700.0) == Approx(781.1728).margin(1e-3));
        REQUIRE(mel_to_hz(hz_to_mel(1234.5)) == Approx(1234.5).epsilon(1e-9));
    }
    SECTION("centers are strictly increasing in Hz") {
        for (std::size_t j = 1; j < bank.filter_count(); ++j)
            REQUIRE(bank.center_hz[j] > bank.center_hz[j - 1]);
    }
    SECTION("unit peak at own center, zero at adjacent centers") {
        for (std::size_t j = 1; j + 1 < bank.filter_count(); ++j) {
            REQUIRE(bank.weight_at(j, bank.center_hz[j]) == 1.0);
            REQUIRE(bank.weight_at(j, bank.center_hz[j - 1]) == 0.0);
            REQUIRE(bank.weight_at(j, bank.center_hz[j + 1]) == 0.0);
        }
    }
    SECTION("rows are non-negative with positive sums") {
        for (std::size_t j = 0; j < bank.filter_count(); ++j) {
            double sum = 0.0;
            for (double w : bank.weights.row(j)) {
                REQUIRE(w >= 0.0);
                sum += w;
            }
            REQUIRE(sum > 0.0);
        }
    }
    SECTION("every bin between the first and last edge is covered") {
        const double bin_hz = 16000.0 / 800.0;
        for (std::size_t k = 0; k < bank.bin_count(); ++k) {
            const double f = static_cast<double>(k) * bin_hz;
            if (f <= bank.edges_hz.front() || f >= bank.edges_hz.back()) continue;
            double coverage = 0.0;
            for (std::size_t j = 0; j < bank.filter_count(); ++j)
                coverage += bank.weights.at(j, k);
            REQUIRE(coverage > 0.0);
        }
    }
    SECTION("preconditions") {
        REQUIRE_THROWS_AS(build_mel_filterbank(16000, 401, 12),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(build_mel_filterbank(16000, 10, 13),
                          std::invalid_argument);
    }
}

TEST_CASE("dct_ii", "[dsp][oracle]") {
    SECTION("constant input excites only coefficient 0") {
        const std::vector<double> constant(40, 2.5);
        const auto coeffs = dct_ii(constant, 40);
        REQUIRE(coeffs[0] == Approx(2.5 * std::sqrt(40.0)).epsilon(1e-12));
        for (std::size_t k = 1; k < coeffs.size(); ++k)
            REQUIRE(coeffs[k] == Approx(0.0).margin(1e-12));
    }
    SECTION("impulse matches the double-loop oracle to 1e-12") {
        std::vector<double> impulse(32, 0.0);
        impulse[0] = 1.0;
        const auto fast = dct_ii(impulse, 32);
        const auto oracle = testutil::naive_dct_ii(impulse, 32);
        for (std::size_t k = 0; k < fast.size(); ++k)
            REQUIRE(std::abs(fast[k] - oracle[k]) < 1e-12);
    }
    SECTION("random input matches the oracle to 1e-12") {
        std::mt19937_64 gen(13);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        std::vector<double> x(40);
        for (double& v : x) v = unit(gen);
        const auto fast = dct_ii(x, 13);
        const auto oracle = testutil::naive_dct_ii(x, 13);
        for (std::size_t k = 0; k < fast.size(); ++k)
            REQUIRE(std::abs(fast[k] - oracle[k]) < 1e-12);
    }
    SECTION("orthonormal transform preserves energy (Parseval)") {
        std::mt19937_64 gen(17);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        std::vector<double> x(64);
        double input_energy = 0.0;
        for (double& v : x) {
            v = unit(gen);
            input_energy += v * v;
        }
        const auto coeffs = dct_ii(x, 64);
        double output_energy = 0.0;
        for (double c : coeffs) output_energy += c * c;
        REQUIRE(output_energy == Approx(input_energy).margin(1e-9));
    }
}

TEST_CASE("chroma map assigns pitch classes around A4 = 440", "[dsp]") {
    // 801 bins at 10 Hz make the reference frequencies exact bins.
    const ChromaMap map = build_chroma_map(16000, 801);
    const double bin_hz = 16000.0 / 1600.0;
    REQUIRE(bin_hz == Approx(10.0));

    REQUIRE(map.pitch_class[44] == 0);   // 440 Hz -> A
    REQUIRE(map.pitch_class[88] == 0);   // 880 Hz, octave equivalence
    REQUIRE(map.pitch_class[47] == 1);   // 470 Hz is nearest A#466.16
    REQUIRE(map.pitch_class[0] == -1);   // DC unassigned
    REQUIRE(map.pitch_class[2] == -1);   // 20 Hz < 27.5 Hz unassigned

    // round(12 log2(466.16/440)) == 1 exactly.
    REQUIRE(std::lround(12.0 * std::log2(466.16 / 440.0)) == 1);

    const ChromaMap fine = build_chroma_map(16000, 401);
    for (std::size_t k = 0; k < fine.bin_count(); ++k) {
        const double f = static_cast<double>(k) * 20.0;
        if (f < 27.5)
            REQUIRE(fine.pitch_class[k] == -1);
        else
            REQUIRE((fine.pitch_class[k] >= 0 && fine.pitch_class[k] < 12));
    }
}
