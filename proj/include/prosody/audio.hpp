// Audio ingestion: PCM WAV decoding, normalization to mono doubles in
// [-1, 1], WAV export and linear-interpolation resampling.
//
// The whole pipeline runs at a canonical 16 kHz mono; spectral features
// assume that rate so clips from any source stay comparable.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "prosody/common.hpp"

namespace prosody {

inline constexpr int kCanonicalSampleRate = 16000;
inline constexpr double kMinClipSeconds = 0.2;
inline constexpr double kMaxClipSeconds = 60.0;

// Mono audio clip. Samples are finite and within [-1, 1] after loading.
struct AudioClip {
    std::vector<double> samples;
    int sample_rate = 0;
    std::string source_path;

    double duration() const {
        return sample_rate > 0
                   ? static_cast<double>(samples.size()) / sample_rate
                   : 0.0;
    }
};

enum class WavFormat { Pcm8, Pcm16, Pcm24, Pcm32, Float32 };

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
    out.push_back((v >> 16) & 0xff);
    out.push_back((v >> 24) & 0xff);
}

inline void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
}

// Decode one sample frame's channel value to a double in [-1, 1].
inline double decode_sample(const unsigned char* p, int bits, bool is_float) {
    if (is_float) {
        float f;
        std::memcpy(&f, p, 4);
        double v = static_cast<double>(f);
        if (!std::isfinite(v)) return 0.0;
        if (v > 1.0) v = 1.0;
        if (v < -1.0) v = -1.0;
        return v;
    }
    switch (bits) {
        case 8:
            // 8-bit WAV is unsigned with midpoint 128.
            return (static_cast<int>(p[0]) - 128) / 128.0;
        case 16: {
            std::int16_t s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
            return s / 32768.0;
        }
        case 24: {
            std::int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
            if (s & 0x800000) s |= ~0xffffff;  // sign extend
            return s / 8388608.0;
        }
        case 32: {
            std::int32_t s;
            std::memcpy(&s, p, 4);
            return s / 2147483648.0;
        }
        default:
            return 0.0;
    }
}

}  // namespace detail

// Decode a PCM WAV file (8/16/24/32-bit integer or 32-bit float, mono or
// stereo). Stereo is averaged to mono; integer samples are scaled by the
// type's full-scale value. Rejects clips shorter than 0.2 s or longer
// than 60 s.
inline AudioClip load_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open audio file: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw DataError("not a RIFF/WAVE file: " + path);

    int channels = 0, bits = 0, sample_rate = 0;
    bool is_float = false, have_fmt = false;
    std::size_t data_off = 0, data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        std::uint32_t chunk_len = detail::read_u32(hdr + 4);
        std::size_t body = pos + 8;
        if (body + chunk_len > bytes.size())
            chunk_len = static_cast<std::uint32_t>(bytes.size() - body);
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (chunk_len < 16) throw DataError("truncated fmt chunk: " + path);
            const unsigned char* f = bytes.data() + body;
            std::uint16_t format = detail::read_u16(f);
            channels = detail::read_u16(f + 2);
            sample_rate = static_cast<int>(detail::read_u32(f + 4));
            bits = detail::read_u16(f + 14);
            if (format == 0xfffe && chunk_len >= 40) {
                // WAVE_FORMAT_EXTENSIBLE: the real format tag leads the GUID.
                format = detail::read_u16(f + 24);
            }
            if (format == 3) {
                is_float = true;
                if (bits != 32)
                    throw DataError("unsupported float bit depth in " + path);
            } else if (format == 1) {
                if (bits != 8 && bits != 16 && bits != 24 && bits != 32)
                    throw DataError(strfmt("unsupported PCM bit depth %d in %s",
                                           bits, path.c_str()));
            } else {
                throw DataError(strfmt(
                    "unsupported encoding (format tag %u, compressed?) in %s",
                    unsigned(format), path.c_str()));
            }
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data_off = body;
            data_len = chunk_len;
        }
        pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
    }

    if (!have_fmt) throw DataError("missing fmt chunk: " + path);
    if (channels < 1 || channels > 2)
        throw DataError(strfmt("unsupported channel count %d in %s", channels,
                               path.c_str()));
    if (sample_rate <= 0) throw DataError("invalid sample rate in " + path);

    const int bytes_per_sample = bits / 8;
    const std::size_t frame_size = static_cast<std::size_t>(bytes_per_sample) * channels;
    const std::size_t n_frames = frame_size ? data_len / frame_size : 0;
    if (data_off == 0 || n_frames == 0)
        throw DataError("zero-length audio: " + path);

    AudioClip clip;
    clip.sample_rate = sample_rate;
    clip.source_path = path;
    clip.samples.resize(n_frames);
    const unsigned char* d = bytes.data() + data_off;
    for (std::size_t i = 0; i < n_frames; ++i) {
        double acc = 0.0;
        for (int ch = 0; ch < channels; ++ch)
            acc += detail::decode_sample(d + i * frame_size + ch * bytes_per_sample,
                                         bits, is_float);
        clip.samples[i] = acc / channels;
    }

    double dur = clip.duration();
    if (dur < kMinClipSeconds || dur > kMaxClipSeconds)
        throw DataError(strfmt("clip duration %.3f s outside [%.1f, %.1f] s: %s",
                               dur, kMinClipSeconds, kMaxClipSeconds,
                               path.c_str()));
    return clip;
}

// Encode a clip as PCM WAV. Samples are clamped to [-1, 1] and quantized
// by rounding, so a round-trip stays within one quantization step.
inline void write_wav(const std::string& path, const AudioClip& clip,
                      WavFormat format = WavFormat::Pcm16) {
    int bits = 16;
    bool is_float = false;
    switch (format) {
        case WavFormat::Pcm8: bits = 8; break;
        case WavFormat::Pcm16: bits = 16; break;
        case WavFormat::Pcm24: bits = 24; break;
        case WavFormat::Pcm32: bits = 32; break;
        case WavFormat::Float32: bits = 32; is_float = true; break;
    }
    const int bytes_per_sample = bits / 8;
    const std::uint32_t data_len =
        static_cast<std::uint32_t>(clip.samples.size() * bytes_per_sample);

    std::vector<unsigned char> out;
    out.reserve(44 + data_len);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    detail::put_u32(out, 36 + data_len);
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    detail::put_u32(out, 16);
    detail::put_u16(out, is_float ? 3 : 1);
    detail::put_u16(out, 1);  // mono
    detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
    detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) *
                             bytes_per_sample);
    detail::put_u16(out, static_cast<std::uint16_t>(bytes_per_sample));
    detail::put_u16(out, static_cast<std::uint16_t>(bits));
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    detail::put_u32(out, data_len);

    for (double raw : clip.samples) {
        double s = raw;
        if (s > 1.0) s = 1.0;
        if (s < -1.0) s = -1.0;
        if (is_float) {
            float f = static_cast<float>(s);
            unsigned char b[4];
            std::memcpy(b, &f, 4);
            out.insert(out.end(), b, b + 4);
        } else if (bits == 8) {
            long q = std::lround(s * 128.0) + 128;
            if (q > 255) q = 255;
            if (q < 0) q = 0;
            out.push_back(static_cast<unsigned char>(q));
        } else {
            const long long full = 1LL << (bits - 1);
            long long q = std::llround(s * static_cast<double>(full));
            if (q > full - 1) q = full - 1;
            if (q < -full) q = -full;
            for (int b = 0; b < bytes_per_sample; ++b)
                out.push_back(static_cast<unsigned char>((q >> (8 * b)) & 0xff));
        }
    }

    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write audio file: " + path);
    os.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
}

// Linear-interpolation resampler. Sufficient for features that are
// aggregated by mean/std; swap point if a windowed-sinc design is ever
// needed. No-op when the rates already match.
inline AudioClip resample(const AudioClip& clip, int target_sr) {
    if (target_sr <= 0) throw std::invalid_argument("resample: target_sr must be > 0");
    if (clip.sample_rate == target_sr) return clip;

    const double ratio = static_cast<double>(target_sr) / clip.sample_rate;
    const std::size_t n_in = clip.samples.size();
    std::size_t n_out = static_cast<std::size_t>(
        std::llround(static_cast<double>(n_in) * ratio));
    if (n_out == 0) n_out = 1;

    AudioClip out;
    out.sample_rate = target_sr;
    out.source_path = clip.source_path;
    out.samples.resize(n_out);
    for (std::size_t i = 0; i < n_out; ++i) {
        double src = static_cast<double>(i) / ratio;
        std::size_t lo = static_cast<std::size_t>(src);
        if (lo >= n_in - 1) {
            out.samples[i] = clip.samples[n_in - 1];
        } else {
            double frac = src - static_cast<double>(lo);
            out.samples[i] =
                clip.samples[lo] * (1.0 - frac) + clip.samples[lo + 1] * frac;
        }
    }
    return out;
}

}  // namespace prosody
