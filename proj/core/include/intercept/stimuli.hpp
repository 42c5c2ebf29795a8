#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "intercept/dsp.hpp"
#include "intercept/random.hpp"
#include "intercept/wav.hpp"

namespace intercept::audio {

enum class Category { Music, Speech, Other };

std::string_view to_string(Category category) noexcept;
/// Accepts "music", "speech", "other" (case-sensitive).
std::optional<Category> parse_category(std::string_view text) noexcept;

/// How excerpts are cut from source recordings.
struct ExcerptPolicy {
    double duration_s = 3.0;
    /// Excerpt is accepted when its l2-norm is strictly greater than this.
    /// Unset means 0.01 * sqrt(duration_s * fs), i.e. -40 dBFS RMS.
    std::optional<double> l2_threshold;
    int max_attempts = 100;
    double taper_s = 0.1;

    /// Throws InvalidArgument unless duration_s > 2 * taper_s, taper_s >= 0,
    /// max_attempts >= 1 and any threshold is non-negative.
    void validate() const;

    [[nodiscard]] std::size_t excerpt_samples(std::uint32_t sample_rate) const;
    [[nodiscard]] double threshold_for(std::uint32_t sample_rate) const;
};

struct Excerpt {
    dsp::Signal signal;
    std::size_t start_offset = 0;  // in samples, into the mono mixdown
};

/// Draws start offsets uniformly from [0, frames - excerpt_samples] until the
/// excerpt's l2-norm exceeds the threshold. Multichannel input is mixed to mono
/// first. NoContent (naming the source) after max_attempts failures.
Excerpt sample_excerpt(const Recording& recording, const ExcerptPolicy& policy, CounterRng& rng);

/// Linear fade in and out: gain[n] = n / T over the first T = round(taper_s*fs)
/// samples, mirrored at the end, so the first and last samples are exactly 0.
dsp::Signal trapezoid_fade(const dsp::Signal& x, double taper_s);

inline constexpr double kTargetPeak = 0.99;

struct NormalizedPair {
    dsp::Signal a;
    dsp::Signal b;
    double gain = 1.0;
};

/// Scales both signals by one shared gain so the louder peak lands on
/// kTargetPeak (never above it).
NormalizedPair normalize_pair(const dsp::Signal& a, const dsp::Signal& b);

struct StimulusPair {
    dsp::Signal original;
    dsp::Signal distorted;
    dsp::PhaseAngle theta;
    double gain_applied = 1.0;
    std::string stimulus_id;
    Category category = Category::Other;
    std::string source_path;
    std::size_t start_offset = 0;
};

/// excerpt -> phase_shift(theta) -> fade both -> normalize_pair.
StimulusPair prepare_stimulus(const Recording& recording, const ExcerptPolicy& policy,
                              dsp::PhaseAngle theta, CounterRng& rng,
                              std::string stimulus_id, Category category);

struct WoodEffectPair {
    dsp::Signal clipped;
    dsp::Signal inverted;
};

/// Sine clipped at clip_level on its positive half-cycles only, and its
/// polarity inversion.
WoodEffectPair wood_effect_stimulus(double freq_hz, double clip_level, double duration_s,
                                    std::uint32_t sample_rate);

// ---------------------------------------------------------------------------
// Stimulus sets and their manifest

struct ManifestEntry {
    std::string stimulus_id;
    Category category = Category::Other;
    std::string source_file;
    std::uint64_t start_offset = 0;
    double theta = 0.0;
    double gain = 1.0;
    std::uint32_t sample_rate = 0;
    double duration_s = 0.0;
    /// Paths of the written pair, relative to the manifest's directory.
    std::string original_file;
    std::string distorted_file;
};

struct StimulusManifest {
    std::uint64_t seed = 0;
    std::string generator;
    ExcerptPolicy policy;
    std::vector<ManifestEntry> stimuli;
};

std::string manifest_to_json(const StimulusManifest& manifest);
StimulusManifest manifest_from_json(const std::string& text);
StimulusManifest load_manifest(const std::filesystem::path& path);

struct SourceFile {
    std::filesystem::path path;
    Category category = Category::Other;
    /// Name recorded in the manifest; defaults to the file name when empty.
    std::string name;
};

/// Recursively collects *.wav under `dir`, sorted by relative path. A file's
/// category is taken from the first path component below `dir` when it is
/// music/, speech/ or other/; everything else is Other.
std::vector<SourceFile> discover_sources(const std::filesystem::path& dir);

/// Prepares one stimulus pair per source and writes them as FLOAT32 WAV into
/// out_dir. Source i uses the stream derive_seed(seed, i): its first draw is
/// theta, the rest feed excerpt sampling. Output is a pure function of the
/// source bytes, their order, the policy and the seed.
StimulusManifest prepare_stimulus_set(const std::vector<SourceFile>& sources,
                                      const std::filesystem::path& out_dir,
                                      const ExcerptPolicy& policy, std::uint64_t seed);

}  // namespace intercept::audio
