#include "intercept/stimuli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "intercept/augment.hpp"
#include "intercept/error.hpp"

namespace intercept::audio {

namespace {

double peak(const dsp::Signal& x) {
    double p = 0.0;
    for (double v : x.samples) {
        p = std::max(p, std::abs(v));
    }
    return p;
}

std::string sanitize_id(std::string text) {
    for (char& c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '-' && c != '_') {
            c = '_';
        }
    }
    return text;
}

}  // namespace

std::string_view to_string(Category category) noexcept {
    switch (category) {
        case Category::Music: return "music";
        case Category::Speech: return "speech";
        case Category::Other: return "other";
    }
    return "other";
}

std::optional<Category> parse_category(std::string_view text) noexcept {
    if (text == "music") return Category::Music;
    if (text == "speech") return Category::Speech;
    if (text == "other") return Category::Other;
    return std::nullopt;
}

void ExcerptPolicy::validate() const {
    if (!(taper_s >= 0.0) || !std::isfinite(taper_s)) {
        fail(ErrorCode::InvalidArgument, "taper must be a non-negative number of seconds");
    }
    if (!(duration_s > 2.0 * taper_s) || !std::isfinite(duration_s)) {
        fail(ErrorCode::InvalidArgument, "excerpt duration must exceed twice the taper");
    }
    if (max_attempts < 1) {
        fail(ErrorCode::InvalidArgument, "max_attempts must be at least 1");
    }
    if (l2_threshold && !(*l2_threshold >= 0.0 && std::isfinite(*l2_threshold))) {
        fail(ErrorCode::InvalidArgument, "l2 threshold must be non-negative");
    }
}

std::size_t ExcerptPolicy::excerpt_samples(std::uint32_t sample_rate) const {
    return static_cast<std::size_t>(std::llround(duration_s * sample_rate));
}

double ExcerptPolicy::threshold_for(std::uint32_t sample_rate) const {
    if (l2_threshold) {
        return *l2_threshold;
    }
    return 0.01 * std::sqrt(duration_s * sample_rate);
}

Excerpt sample_excerpt(const Recording& recording, const ExcerptPolicy& policy, CounterRng& rng) {
    policy.validate();
    const dsp::Signal mono = recording.mono();
    const std::size_t length = policy.excerpt_samples(mono.sample_rate);
    if (length == 0 || mono.size() < length) {
        fail(ErrorCode::InvalidArgument,
             recording.source_path + ": recording is shorter than the excerpt duration");
    }
    const double threshold = policy.threshold_for(mono.sample_rate);
    const std::uint64_t starts = mono.size() - length + 1;

    for (int attempt = 0; attempt < policy.max_attempts; ++attempt) {
        const auto start = static_cast<std::size_t>(rng.next_below(starts));
        const auto first = mono.samples.begin() + static_cast<std::ptrdiff_t>(start);
        double energy = 0.0;
        for (auto it = first; it != first + static_cast<std::ptrdiff_t>(length); ++it) {
            energy += *it * *it;
        }
        if (std::sqrt(energy) > threshold) {
            return Excerpt{dsp::Signal{std::vector<double>(first, first + static_cast<std::ptrdiff_t>(length)),
                                       mono.sample_rate},
                           start};
        }
    }
    fail(ErrorCode::NoContent, recording.source_path + ": no excerpt above the l2 threshold after " +
                                   std::to_string(policy.max_attempts) + " attempts");
}

dsp::Signal trapezoid_fade(const dsp::Signal& x, double taper_s) {
    if (!(taper_s >= 0.0) || !std::isfinite(taper_s)) {
        fail(ErrorCode::InvalidArgument, "taper must be a non-negative number of seconds");
    }
    const auto taper = static_cast<std::size_t>(std::llround(taper_s * x.sample_rate));
    if (2 * taper > x.size()) {
        fail(ErrorCode::InvalidArgument, "fade ramps would overlap: taper longer than half the signal");
    }
    dsp::Signal out = x;
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < taper; ++i) {
        const double gain = static_cast<double>(i) / static_cast<double>(taper);
        out.samples[i] *= gain;
        out.samples[n - 1 - i] *= gain;
    }
    return out;
}

NormalizedPair normalize_pair(const dsp::Signal& a, const dsp::Signal& b) {
    if (a.size() != b.size() || a.sample_rate != b.sample_rate) {
        fail(ErrorCode::InvalidArgument, "pair differs in length or sample rate");
    }
    const double top = std::max(peak(a), peak(b));
    if (!(top > 0.0)) {
        fail(ErrorCode::DegeneratePair, "both signals of the pair are silent");
    }
    double gain = kTargetPeak / top;
    while (top * gain > kTargetPeak) {
        gain = std::nextafter(gain, 0.0);
    }
    NormalizedPair out{a, b, gain};
    for (double& v : out.a.samples) v *= gain;
    for (double& v : out.b.samples) v *= gain;
    return out;
}

StimulusPair prepare_stimulus(const Recording& recording, const ExcerptPolicy& policy,
                              dsp::PhaseAngle theta, CounterRng& rng,
                              std::string stimulus_id, Category category) {
    const Excerpt excerpt = sample_excerpt(recording, policy, rng);
    const dsp::Signal shifted = dsp::phase_shift(excerpt.signal, theta);
    NormalizedPair pair = normalize_pair(trapezoid_fade(excerpt.signal, policy.taper_s),
                                         trapezoid_fade(shifted, policy.taper_s));
    StimulusPair out;
    out.original = std::move(pair.a);
    out.distorted = std::move(pair.b);
    out.theta = theta;
    out.gain_applied = pair.gain;
    out.stimulus_id = std::move(stimulus_id);
    out.category = category;
    out.source_path = recording.source_path;
    out.start_offset = excerpt.start_offset;
    return out;
}

WoodEffectPair wood_effect_stimulus(double freq_hz, double clip_level, double duration_s,
                                    std::uint32_t sample_rate) {
    if (sample_rate == 0) {
        fail(ErrorCode::InvalidArgument, "sample rate must be positive");
    }
    if (!(clip_level > 0.0 && clip_level < 1.0)) {
        fail(ErrorCode::InvalidArgument, "clip level must lie in (0, 1)");
    }
    if (!(freq_hz > 0.0 && freq_hz < sample_rate / 2.0)) {
        fail(ErrorCode::InvalidArgument, "frequency must lie in (0, fs/2)");
    }
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
        fail(ErrorCode::InvalidArgument, "duration must be positive");
    }
    const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
    if (n == 0) {
        fail(ErrorCode::InvalidArgument, "duration shorter than one sample");
    }
    WoodEffectPair out{dsp::Signal{std::vector<double>(n), sample_rate},
                       dsp::Signal{std::vector<double>(n), sample_rate}};
    const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::min(std::sin(omega * static_cast<double>(i)), clip_level);
        out.clipped.samples[i] = v;
        out.inverted.samples[i] = -v;
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string manifest_to_json(const StimulusManifest& manifest) {
    nlohmann::ordered_json policy;
    policy["duration_s"] = manifest.policy.duration_s;
    policy["taper_s"] = manifest.policy.taper_s;
    policy["max_attempts"] = manifest.policy.max_attempts;
    if (manifest.policy.l2_threshold) {
        policy["l2_threshold"] = *manifest.policy.l2_threshold;
    } else {
        policy["l2_threshold"] = nullptr;
    }

    nlohmann::ordered_json doc;
    doc["seed"] = manifest.seed;
    doc["generator"] = manifest.generator;
    doc["policy"] = policy;
    doc["stimuli"] = nlohmann::ordered_json::array();
    for (const ManifestEntry& e : manifest.stimuli) {
        nlohmann::ordered_json j;
        j["stimulus_id"] = e.stimulus_id;
        j["category"] = std::string(to_string(e.category));
        j["source_file"] = e.source_file;
        j["start_offset"] = e.start_offset;
        j["theta"] = e.theta;
        j["gain"] = e.gain;
        j["fs"] = e.sample_rate;
        j["duration"] = e.duration_s;
        j["original_file"] = e.original_file;
        j["distorted_file"] = e.distorted_file;
        doc["stimuli"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

StimulusManifest manifest_from_json(const std::string& text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        StimulusManifest m;
        m.seed = doc.value("seed", std::uint64_t{0});
        m.generator = doc.value("generator", std::string{});
        if (doc.contains("policy")) {
            const auto& p = doc.at("policy");
            m.policy.duration_s = p.value("duration_s", 3.0);
            m.policy.taper_s = p.value("taper_s", 0.1);
            m.policy.max_attempts = p.value("max_attempts", 100);
            if (p.contains("l2_threshold") && !p.at("l2_threshold").is_null()) {
                m.policy.l2_threshold = p.at("l2_threshold").get<double>();
            }
        }
        std::set<std::string> seen;
        for (const auto& j : doc.at("stimuli")) {
            ManifestEntry e;
            e.stimulus_id = j.at("stimulus_id").get<std::string>();
            const auto category = parse_category(j.at("category").get<std::string>());
            if (!category) {
                fail(ErrorCode::Configuration, "manifest: unknown category for " + e.stimulus_id);
            }
            if (!seen.insert(e.stimulus_id).second) {
                fail(ErrorCode::Configuration, "manifest: duplicate stimulus_id " + e.stimulus_id);
            }
            e.category = *category;
            e.source_file = j.value("source_file", std::string{});
            e.start_offset = j.value("start_offset", std::uint64_t{0});
            e.theta = j.at("theta").get<double>();
            e.gain = j.value("gain", 1.0);
            e.sample_rate = j.value("fs", std::uint32_t{0});
            e.duration_s = j.value("duration", 0.0);
            e.original_file = j.at("original_file").get<std::string>();
            e.distorted_file = j.at("distorted_file").get<std::string>();
            m.stimuli.push_back(std::move(e));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Configuration, std::string("manifest: ") + e.what());
    }
}

StimulusManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::FileNotFound, path.string() + ": cannot open manifest");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return manifest_from_json(buffer.str());
}

std::vector<SourceFile> discover_sources(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        fail(ErrorCode::FileNotFound, dir.string() + ": not a directory");
    }
    std::vector<std::pair<std::string, SourceFile>> found;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext != ".wav") {
            continue;
        }
        const fs::path rel = entry.path().lexically_relative(dir);
        Category category = Category::Other;
        if (std::distance(rel.begin(), rel.end()) > 1) {
            category = parse_category(rel.begin()->string()).value_or(Category::Other);
        }
        found.push_back({rel.generic_string(), SourceFile{entry.path(), category, rel.generic_string()}});
    }
    std::sort(found.begin(), found.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    std::vector<SourceFile> out;
    out.reserve(found.size());
    for (auto& f : found) {
        out.push_back(std::move(f.second));
    }
    return out;
}

StimulusManifest prepare_stimulus_set(const std::vector<SourceFile>& sources,
                                      const std::filesystem::path& out_dir,
                                      const ExcerptPolicy& policy, std::uint64_t seed) {
    policy.validate();
    if (sources.empty()) {
        fail(ErrorCode::InvalidArgument, "no source recordings given");
    }
    std::filesystem::create_directories(out_dir);

    StimulusManifest manifest;
    manifest.seed = seed;
    manifest.generator = std::string(CounterRng::kName) + "/v" + std::to_string(CounterRng::kVersion);
    manifest.policy = policy;

    std::map<std::string, int> id_uses;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const SourceFile& src = sources[i];
        const Recording recording = read_wav(src.path);

        std::string id = std::string(to_string(src.category)) + "-" +
                         sanitize_id(src.path.stem().string());
        if (const int uses = ++id_uses[id]; uses > 1) {
            id += "-" + std::to_string(uses);
        }

        CounterRng rng(derive_seed(seed, i));
        const dsp::PhaseAngle theta = augment::draw_theta(rng);
        const StimulusPair pair = prepare_stimulus(recording, policy, theta, rng, id, src.category);

        ManifestEntry e;
        e.stimulus_id = id;
        e.category = src.category;
        e.source_file = src.name.empty() ? src.path.filename().string() : src.name;
        e.start_offset = pair.start_offset;
        e.theta = pair.theta.radians();
        e.gain = pair.gain_applied;
        e.sample_rate = pair.original.sample_rate;
        e.duration_s = static_cast<double>(pair.original.size()) / pair.original.sample_rate;
        e.original_file = id + "_original.wav";
        e.distorted_file = id + "_distorted.wav";

        write_wav(out_dir / e.original_file, Recording::from_signal(pair.original), SampleFormat::Float32);
        write_wav(out_dir / e.distorted_file, Recording::from_signal(pair.distorted), SampleFormat::Float32);
        manifest.stimuli.push_back(std::move(e));
    }
    return manifest;
}

}  // namespace intercept::audio
