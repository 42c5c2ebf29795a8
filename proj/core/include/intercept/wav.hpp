#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "intercept/dsp.hpp"

namespace intercept::audio {

enum class SampleFormat { Pcm16, Pcm24, Float32, Float64 };

std::string_view to_string(SampleFormat format) noexcept;

/// Decoded audio file. Samples are normalized to [-1, 1]: integer PCM is
/// divided by 2^(bits-1), so full-scale positive PCM16 reads as 32767/32768.
struct Recording {
    std::vector<std::vector<double>> channels;
    std::uint32_t sample_rate = 0;
    std::string source_path;
    SampleFormat bit_depth_in = SampleFormat::Float32;

    [[nodiscard]] std::size_t frames() const noexcept {
        return channels.empty() ? 0 : channels.front().size();
    }
    [[nodiscard]] std::size_t channel_count() const noexcept { return channels.size(); }

    [[nodiscard]] dsp::Signal channel(std::size_t index) const;

    /// Channel mean; the stimuli pipeline is monaural.
    [[nodiscard]] dsp::Signal mono() const;

    static Recording from_signal(const dsp::Signal& x, std::string source_path = {});
};

Recording read_wav(const std::filesystem::path& path);

/// Reads a complete WAV byte stream (e.g. standard input). A data chunk size of
/// 0 or 0xFFFFFFFF is taken to mean "until end of stream", as written by
/// tools that stream WAV through pipes.
Recording read_wav(std::istream& in, const std::string& source_name);

Recording decode_wav(std::span<const std::uint8_t> bytes, const std::string& source_name);

/// Pcm16, Float32 and Float64 are writable. Pcm16 rejects any |sample| > 1 with
/// a Clipping error rather than clipping silently; Float32 rounds each sample to
/// the nearest float; Float64 is lossless.
std::vector<std::uint8_t> encode_wav(const Recording& recording, SampleFormat format);

void write_wav(const std::filesystem::path& path, const Recording& recording, SampleFormat format);
void write_wav(std::ostream& out, const Recording& recording, SampleFormat format);

}  // namespace intercept::audio
