#include "intercept/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include "intercept/error.hpp"

namespace intercept::audio {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

bool tag_is(const std::uint8_t* p, const char* tag) { return std::memcmp(p, tag, 4) == 0; }

[[noreturn]] void malformed(const std::string& source, const std::string& what) {
    fail(ErrorCode::MalformedFile, source + ": " + what);
}

struct FormatChunk {
    std::uint16_t tag = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t block_align = 0;
    std::uint16_t bits = 0;
};

FormatChunk parse_fmt(const std::uint8_t* p, std::uint32_t size, const std::string& source) {
    if (size < 16) {
        malformed(source, "fmt chunk too short");
    }
    FormatChunk fmt;
    fmt.tag = le16(p);
    fmt.channels = le16(p + 2);
    fmt.sample_rate = le32(p + 4);
    fmt.block_align = le16(p + 12);
    fmt.bits = le16(p + 14);
    if (fmt.tag == kFormatExtensible) {
        if (size < 40) {
            malformed(source, "extensible fmt chunk too short");
        }
        // First two bytes of the sub-format GUID carry the real format tag.
        fmt.tag = le16(p + 24);
    }
    return fmt;
}

SampleFormat classify(const FormatChunk& fmt, const std::string& source) {
    if (fmt.tag == kFormatPcm && fmt.bits == 16) {
        return SampleFormat::Pcm16;
    }
    if (fmt.tag == kFormatPcm && fmt.bits == 24) {
        return SampleFormat::Pcm24;
    }
    if (fmt.tag == kFormatFloat && fmt.bits == 32) {
        return SampleFormat::Float32;
    }
    if (fmt.tag == kFormatFloat && fmt.bits == 64) {
        return SampleFormat::Float64;
    }
    fail(ErrorCode::UnsupportedCodec, source + ": unsupported WAV encoding (format tag " +
                                          std::to_string(fmt.tag) + ", " +
                                          std::to_string(fmt.bits) + " bits)");
}

double decode_sample(const std::uint8_t* p, SampleFormat format) {
    switch (format) {
        case SampleFormat::Pcm16:
            return static_cast<double>(static_cast<std::int16_t>(le16(p))) / 32768.0;
        case SampleFormat::Pcm24: {
            std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
            if ((v & 0x800000) != 0) {
                v -= 0x1000000;
            }
            return static_cast<double>(v) / 8388608.0;
        }
        case SampleFormat::Float32:
            return static_cast<double>(std::bit_cast<float>(le32(p)));
        case SampleFormat::Float64:
            return std::bit_cast<double>(static_cast<std::uint64_t>(le32(p)) |
                                         (static_cast<std::uint64_t>(le32(p + 4)) << 32));
    }
    return 0.0;
}

std::size_t bytes_per_sample(SampleFormat format) {
    switch (format) {
        case SampleFormat::Pcm16: return 2;
        case SampleFormat::Pcm24: return 3;
        case SampleFormat::Float32: return 4;
        case SampleFormat::Float64: return 8;
    }
    return 0;
}

}  // namespace

std::string_view to_string(SampleFormat format) noexcept {
    switch (format) {
        case SampleFormat::Pcm16: return "PCM16";
        case SampleFormat::Pcm24: return "PCM24";
        case SampleFormat::Float32: return "FLOAT32";
        case SampleFormat::Float64: return "FLOAT64";
    }
    return "unknown";
}

dsp::Signal Recording::channel(std::size_t index) const {
    if (index >= channels.size()) {
        fail(ErrorCode::InvalidArgument, "channel index out of range");
    }
    return dsp::Signal{channels[index], sample_rate};
}

dsp::Signal Recording::mono() const {
    if (channels.empty()) {
        fail(ErrorCode::InvalidArgument, source_path + ": recording has no channels");
    }
    if (channels.size() == 1) {
        return dsp::Signal{channels.front(), sample_rate};
    }
    dsp::Signal out{std::vector<double>(frames(), 0.0), sample_rate};
    for (const auto& ch : channels) {
        for (std::size_t n = 0; n < out.samples.size(); ++n) {
            out.samples[n] += ch[n];
        }
    }
    const double scale = 1.0 / static_cast<double>(channels.size());
    for (double& v : out.samples) {
        v *= scale;
    }
    return out;
}

Recording Recording::from_signal(const dsp::Signal& x, std::string source_path) {
    Recording r;
    r.channels.push_back(x.samples);
    r.sample_rate = x.sample_rate;
    r.source_path = std::move(source_path);
    return r;
}

Recording decode_wav(std::span<const std::uint8_t> bytes, const std::string& source_name) {
    if (bytes.size() < 12) {
        malformed(source_name, "truncated RIFF header");
    }
    if (!tag_is(bytes.data(), "RIFF") || !tag_is(bytes.data() + 8, "WAVE")) {
        malformed(source_name, "not a RIFF/WAVE file");
    }

    std::optional<FormatChunk> fmt;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint8_t* header = bytes.data() + pos;
        const std::uint32_t chunk_size = le32(header + 4);
        const std::size_t body = pos + 8;
        const std::size_t remaining = bytes.size() - body;

        if (tag_is(header, "fmt ")) {
            if (chunk_size > remaining) {
                malformed(source_name, "truncated fmt chunk");
            }
            fmt = parse_fmt(bytes.data() + body, chunk_size, source_name);
        } else if (tag_is(header, "data")) {
            if (!fmt) {
                malformed(source_name, "data chunk before fmt chunk");
            }
            const SampleFormat format = classify(*fmt, source_name);
            if (fmt->channels == 0 || fmt->sample_rate == 0) {
                malformed(source_name, "zero channels or sample rate");
            }
            const std::size_t width = bytes_per_sample(format);
            if (fmt->block_align != fmt->channels * width) {
                malformed(source_name, "block alignment does not match channels and bit depth");
            }
            std::size_t data_size = chunk_size;
            const bool streamed = chunk_size == 0 || chunk_size == 0xFFFFFFFFu;
            if (streamed) {
                data_size = remaining - remaining % fmt->block_align;
            } else if (data_size > remaining) {
                malformed(source_name, "truncated data chunk");
            }
            const std::size_t frame_count = data_size / fmt->block_align;

            Recording rec;
            rec.sample_rate = fmt->sample_rate;
            rec.source_path = source_name;
            rec.bit_depth_in = format;
            rec.channels.assign(fmt->channels, std::vector<double>(frame_count));
            const std::uint8_t* p = bytes.data() + body;
            for (std::size_t f = 0; f < frame_count; ++f) {
                for (std::size_t c = 0; c < fmt->channels; ++c) {
                    rec.channels[c][f] = decode_sample(p, format);
                    p += width;
                }
            }
            return rec;
        }
        // Chunks are padded to even sizes.
        const std::size_t advance = 8 + static_cast<std::size_t>(chunk_size) + (chunk_size & 1u);
        if (advance > bytes.size() - pos) {
            break;
        }
        pos += advance;
    }
    malformed(source_name, fmt ? "missing data chunk" : "missing fmt chunk");
}

Recording read_wav(std::istream& in, const std::string& source_name) {
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>()};
    return decode_wav(bytes, source_name);
}

Recording read_wav(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        fail(ErrorCode::FileNotFound, path.string() + ": no such file");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::IoFailure, path.string() + ": cannot open for reading");
    }
    return read_wav(in, path.string());
}

std::vector<std::uint8_t> encode_wav(const Recording& recording, SampleFormat format) {
    if (format == SampleFormat::Pcm24) {
        fail(ErrorCode::UnsupportedCodec, "writing PCM24 is not supported");
    }
    if (recording.channels.empty() || recording.sample_rate == 0) {
        fail(ErrorCode::InvalidArgument, "cannot encode a recording without channels or rate");
    }
    const std::size_t frames = recording.frames();
    for (const auto& ch : recording.channels) {
        if (ch.size() != frames) {
            fail(ErrorCode::InvalidArgument, "channels differ in length");
        }
    }
    const std::size_t n_channels = recording.channels.size();
    const std::size_t width = bytes_per_sample(format);
    const std::size_t data_size = frames * n_channels * width;
    if (data_size > 0xFFFFFFFFu - 36) {
        fail(ErrorCode::InvalidArgument, "recording too large for a RIFF file");
    }

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);
    put_tag(out, "RIFF");
    put32(out, static_cast<std::uint32_t>(36 + data_size));
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put32(out, 16);
    put16(out, format == SampleFormat::Pcm16 ? kFormatPcm : kFormatFloat);
    put16(out, static_cast<std::uint16_t>(n_channels));
    put32(out, recording.sample_rate);
    put32(out, static_cast<std::uint32_t>(recording.sample_rate * n_channels * width));
    put16(out, static_cast<std::uint16_t>(n_channels * width));
    put16(out, static_cast<std::uint16_t>(width * 8));
    put_tag(out, "data");
    put32(out, static_cast<std::uint32_t>(data_size));

    for (std::size_t f = 0; f < frames; ++f) {
        for (std::size_t c = 0; c < n_channels; ++c) {
            const double v = recording.channels[c][f];
            if (!std::isfinite(v)) {
                fail(ErrorCode::InvalidArgument,
                     "non-finite sample at frame " + std::to_string(f));
            }
            if (format == SampleFormat::Pcm16) {
                if (std::abs(v) > 1.0) {
                    fail(ErrorCode::Clipping, "sample " + std::to_string(v) + " at frame " +
                                                  std::to_string(f) +
                                                  " exceeds PCM16 full scale");
                }
                const long q = std::clamp(std::lround(v * 32768.0), -32768L, 32767L);
                put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
            } else if (format == SampleFormat::Float32) {
                put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
            } else {
                const auto bits = std::bit_cast<std::uint64_t>(v);
                put32(out, static_cast<std::uint32_t>(bits));
                put32(out, static_cast<std::uint32_t>(bits >> 32));
            }
        }
    }
    return out;
}

void write_wav(std::ostream& out, const Recording& recording, SampleFormat format) {
    const auto bytes = encode_wav(recording, format);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        fail(ErrorCode::IoFailure, "failed writing WAV stream");
    }
}

void write_wav(const std::filesystem::path& path, const Recording& recording, SampleFormat format) {
    const auto bytes = encode_wav(recording, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::IoFailure, path.string() + ": cannot open for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        fail(ErrorCode::IoFailure, path.string() + ": write failed");
    }
}

}  // namespace intercept::audio
