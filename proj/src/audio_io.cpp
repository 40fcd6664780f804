#include "bispeech/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "bispeech/error.hpp"

namespace bispeech {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0]) | (static_cast<std::uint16_t>(p[1]) << 8);
}

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

double decode_sample(const unsigned char* p, std::uint16_t format, int bits) {
    if (format == kFormatFloat) {
        float v;
        std::uint32_t raw = read_u32(p);
        std::memcpy(&v, &raw, sizeof v);
        return std::clamp(static_cast<double>(v), -1.0, 1.0);
    }
    switch (bits) {
        case 8:
            // u8 is offset-binary.
            return (static_cast<int>(p[0]) - 128) / 128.0;
        case 16: {
            const std::int16_t v = static_cast<std::int16_t>(read_u16(p));
            return v / 32768.0;
        }
        case 24: {
            std::int32_t v = static_cast<std::int32_t>(p[0]) | (static_cast<std::int32_t>(p[1]) << 8) |
                             (static_cast<std::int32_t>(p[2]) << 16);
            if (v & 0x800000) v -= 0x1000000;
            return v / 8388608.0;
        }
        default:
            return 0.0;
    }
}

}  // namespace

WavData load_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        fail(ErrorCode::MalformedContainer, path + " is not a RIFF/WAVE file");
    }

    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
    bool have_fmt = false;
    std::size_t data_offset = 0;
    std::size_t data_size = 0;
    bool have_data = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t chunk_size = read_u32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + chunk_size > bytes.size()) {
            fail(ErrorCode::MalformedContainer, path + ": chunk overruns file");
        }
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (chunk_size < 16) fail(ErrorCode::MalformedContainer, path + ": fmt chunk too small");
            format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            sample_rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            if (format == kFormatExtensible && chunk_size >= 40) {
                // Sub-format GUID starts with the effective format code.
                format = read_u16(bytes.data() + body + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_offset = body;
            data_size = chunk_size;
            have_data = true;
        }
        pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
    }

    if (!have_fmt || !have_data) {
        fail(ErrorCode::MalformedContainer, path + ": missing fmt or data chunk");
    }
    if (channels == 0 || sample_rate == 0) {
        fail(ErrorCode::MalformedContainer, path + ": zero channels or sample rate");
    }
    const bool pcm_ok = format == kFormatPcm && (bits == 8 || bits == 16 || bits == 24);
    const bool float_ok = format == kFormatFloat && bits == 32;
    if (!pcm_ok && !float_ok) {
        fail(ErrorCode::UnsupportedEncoding,
             path + ": format " + std::to_string(format) + ", " + std::to_string(bits) + " bits");
    }
    const std::size_t bytes_per_sample = bits / 8;
    const std::size_t total_samples = data_size / bytes_per_sample;
    if (total_samples == 0) fail(ErrorCode::EmptyAudio, path + " has no audio frames");

    Eigen::VectorXd samples(static_cast<Eigen::Index>(total_samples));
    const unsigned char* p = bytes.data() + data_offset;
    for (std::size_t i = 0; i < total_samples; ++i) {
        samples(static_cast<Eigen::Index>(i)) = decode_sample(p + i * bytes_per_sample, format, bits);
    }

    WavData out;
    out.clip.samples = std::move(samples);
    out.clip.sample_rate = static_cast<int>(sample_rate);
    out.clip.source_path = path;
    out.channels = channels;
    return out;
}

AudioClip to_mono(const AudioClip& clip, int channel_count) {
    if (channel_count < 1) fail(ErrorCode::InvalidArgument, "channel count must be positive");
    if (clip.samples.size() % channel_count != 0) {
        fail(ErrorCode::LengthMismatch,
             std::to_string(clip.samples.size()) + " samples not divisible by " +
                 std::to_string(channel_count) + " channels");
    }
    if (channel_count == 1) return clip;
    const Eigen::Index frames = clip.samples.size() / channel_count;
    AudioClip mono;
    mono.sample_rate = clip.sample_rate;
    mono.source_path = clip.source_path;
    mono.samples.resize(frames);
    for (Eigen::Index f = 0; f < frames; ++f) {
        mono.samples(f) = clip.samples.segment(f * channel_count, channel_count).mean();
    }
    return mono;
}

AudioClip trim(const AudioClip& clip, double max_seconds) {
    if (max_seconds <= 0.0) fail(ErrorCode::InvalidArgument, "max_seconds must be positive");
    const auto cap = static_cast<Eigen::Index>(std::llround(max_seconds * clip.sample_rate));
    if (clip.samples.size() <= cap) return clip;
    AudioClip out;
    out.sample_rate = clip.sample_rate;
    out.source_path = clip.source_path;
    out.samples = clip.samples.head(cap);
    return out;
}

AudioClip load_mono_wav(const std::string& path, double max_seconds) {
    WavData wav = load_wav(path);
    return trim(to_mono(wav.clip, wav.channels), max_seconds);
}

void write_wav(const std::string& path, const AudioClip& clip, int channels) {
    if (channels < 1) fail(ErrorCode::InvalidArgument, "channel count must be positive");
    if (clip.sample_rate <= 0) fail(ErrorCode::InvalidArgument, "sample rate must be positive");

    const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
    const std::uint32_t data_size = n * 2;
    std::vector<unsigned char> out;
    out.reserve(44 + data_size);

    auto push_u16 = [&out](std::uint32_t v) {
        out.push_back(v & 0xFF);
        out.push_back((v >> 8) & 0xFF);
    };
    auto push_u32 = [&out](std::uint32_t v) {
        out.push_back(v & 0xFF);
        out.push_back((v >> 8) & 0xFF);
        out.push_back((v >> 16) & 0xFF);
        out.push_back((v >> 24) & 0xFF);
    };
    auto push_tag = [&out](const char* tag) { out.insert(out.end(), tag, tag + 4); };

    const std::uint32_t byte_rate = static_cast<std::uint32_t>(clip.sample_rate) * channels * 2;
    push_tag("RIFF");
    push_u32(36 + data_size);
    push_tag("WAVE");
    push_tag("fmt ");
    push_u32(16);
    push_u16(kFormatPcm);
    push_u16(static_cast<std::uint16_t>(channels));
    push_u32(static_cast<std::uint32_t>(clip.sample_rate));
    push_u32(byte_rate);
    push_u16(static_cast<std::uint16_t>(channels * 2));  // block align
    push_u16(16);
    push_tag("data");
    push_u32(data_size);
    for (Eigen::Index i = 0; i < clip.samples.size(); ++i) {
        const double clamped = std::clamp(clip.samples(i), -1.0, 1.0);
        const auto q = static_cast<std::int32_t>(std::llround(clamped * 32768.0));
        push_u16(static_cast<std::uint16_t>(std::clamp(q, -32768, 32767)));
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) fail(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!file) fail(ErrorCode::IoFailure, "short write to " + path);
}

}  // namespace bispeech
