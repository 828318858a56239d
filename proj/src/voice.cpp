#include "qmuse/voice.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "qmuse/errors.hpp"

namespace qmuse::voice {

namespace {

constexpr double kGrainFloor = 1e-4;  // grains stop once the envelope drops below this
constexpr double kMaxExcitation = 0.002; // seconds

double* formant_field(VoicePatch& patch, std::string_view key)
{
    // fq3s, amp1e, bw5s ...
    std::string_view family;
    for (std::string_view f : {"fq", "amp", "bw"}) {
        if (key.starts_with(f)) family = f;
    }
    if (family.empty() || key.size() != family.size() + 2) return nullptr;
    const char digit = key[family.size()];
    const char edge = key[family.size() + 1];
    if (digit < '1' || digit > '0' + kFormantCount || (edge != 's' && edge != 'e')) return nullptr;
    Formant& f = patch.formants[static_cast<std::size_t>(digit - '1')];
    const bool start = edge == 's';
    if (family == "fq") return start ? &f.fq_start : &f.fq_end;
    if (family == "amp") return start ? &f.amp_start : &f.amp_end;
    return start ? &f.bw_start : &f.bw_end;
}

double* field(VoicePatch& patch, std::string_view key)
{
    if (double* f = formant_field(patch, key)) return f;
    if (key == "fnds") return &patch.fnd_start;
    if (key == "fnde") return &patch.fnd_end;
    if (key == "dur") return &patch.dur;
    if (key == "ldns") return &patch.ldns;
    if (key == "vibrato_rate") return &patch.vibrato_rate;
    if (key == "vibrato_depth") return &patch.vibrato_depth;
    if (key == "attack") return &patch.adsr.attack;
    if (key == "decay") return &patch.adsr.decay;
    if (key == "sustain_level") return &patch.adsr.sustain_level;
    if (key == "release") return &patch.adsr.release;
    return nullptr;
}

double adsr_gain(const Adsr& env, double t, double dur)
{
    const double attack = env.attack * dur;
    const double decay = env.decay * dur;
    const double release = env.release * dur;
    if (t < attack) return t / attack;
    if (t < attack + decay) return 1.0 - (1.0 - env.sustain_level) * (t - attack) / decay;
    const double release_start = dur - release;
    if (t < release_start) return env.sustain_level;
    if (release <= 0.0) return env.sustain_level;
    return env.sustain_level * std::max(0.0, (dur - t) / release);
}

/// Adds one FOF grain starting at sample `start` into `out`.
void add_grain(std::vector<double>& out, std::size_t start, double freq, double gain,
               double bandwidth, double sample_rate)
{
    const double excitation = std::min(1.0 / (2.0 * freq), kMaxExcitation);
    const double lifetime = std::log(1.0 / kGrainFloor) / (std::numbers::pi * bandwidth);
    const auto length = std::min(static_cast<std::size_t>(std::ceil(lifetime * sample_rate)),
                                 out.size() - start);
    const auto rise_samples = static_cast<std::size_t>(std::ceil(excitation * sample_rate));

    const double decay_step = std::exp(-std::numbers::pi * bandwidth / sample_rate);
    const std::complex<double> rotation = std::polar(1.0, 2.0 * std::numbers::pi * freq / sample_rate);
    std::complex<double> phasor{gain, 0.0}; // gain * e^{-pi bw tau} * e^{i 2 pi f tau}
    for (std::size_t k = 0; k < length; ++k) {
        double value = phasor.imag();
        if (k < rise_samples) {
            const double tau = static_cast<double>(k) / sample_rate;
            value *= 0.5 * (1.0 - std::cos(std::numbers::pi * tau / excitation));
        }
        out[start + k] += value;
        phasor *= rotation * decay_step;
    }
}

} // namespace

VoicePatch default_patch()
{
    VoicePatch p;
    p.formants[0] = {800.0, 800.0, 0.0, 0.0, 80.0, 80.0};
    p.formants[1] = {1150.0, 1150.0, -6.0, -6.0, 90.0, 90.0};
    p.formants[2] = {2900.0, 2900.0, -32.0, -32.0, 120.0, 120.0};
    p.formants[3] = {3250.0, 3250.0, -24.0, -24.0, 130.0, 130.0};
    p.formants[4] = {3700.0, 3700.0, -40.0, -40.0, 140.0, 140.0};
    p.fnd_start = p.fnd_end = 220.0;
    p.dur = 2.0;
    return p;
}

void set_parameter(VoicePatch& patch, std::string_view key, double value)
{
    double* f = field(patch, key);
    if (f == nullptr) throw ConfigError("unknown voice parameter '" + std::string(key) + "'");
    *f = value;
}

double get_parameter(const VoicePatch& patch, std::string_view key)
{
    const double* f = field(const_cast<VoicePatch&>(patch), key);
    if (f == nullptr) throw ConfigError("unknown voice parameter '" + std::string(key) + "'");
    return *f;
}

const std::vector<std::string>& parameter_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (int k = 1; k <= kFormantCount; ++k) {
            for (const char* family : {"fq", "amp", "bw"}) {
                for (const char* edge : {"s", "e"}) {
                    n.push_back(std::string(family) + std::to_string(k) + edge);
                }
            }
        }
        for (const char* extra : {"fnds", "fnde", "dur", "ldns", "vibrato_rate", "vibrato_depth",
                                  "attack", "decay", "sustain_level", "release"}) {
            n.emplace_back(extra);
        }
        return n;
    }();
    return names;
}

void validate_patch(const VoicePatch& p)
{
    auto fail = [](const std::string& what) { throw std::invalid_argument("invalid patch: " + what); };
    for (const auto& name : parameter_names()) {
        if (!std::isfinite(get_parameter(p, name))) fail(name + " is not finite");
    }
    if (p.dur <= 0.0) fail("dur must be positive");
    if (p.fnd_start <= 0.0 || p.fnd_end <= 0.0) fail("fundamental must be positive");
    if (p.ldns < 0.0 || p.ldns > 1.0) fail("ldns must be in [0, 1]");
    if (p.vibrato_rate < 0.0) fail("vibrato_rate must be non-negative");
    if (p.vibrato_depth < 0.0 || p.vibrato_depth >= 1.0) fail("vibrato_depth must be in [0, 1)");
    for (std::size_t k = 0; k < p.formants.size(); ++k) {
        const auto& f = p.formants[k];
        const std::string tag = "formant " + std::to_string(k + 1);
        if (f.fq_start <= 0.0 || f.fq_end <= 0.0) fail(tag + " frequency must be positive");
        if (f.bw_start <= 0.0 || f.bw_end <= 0.0) fail(tag + " bandwidth must be positive");
        if (f.amp_start > 0.0 || f.amp_end > 0.0) fail(tag + " amplitude must be <= 0 dB");
    }
    if (p.formants[0].amp_start != 0.0 || p.formants[0].amp_end != 0.0) {
        fail("formant 1 is the 0 dB reference");
    }
    const auto& e = p.adsr;
    if (e.attack < 0.0 || e.decay < 0.0 || e.release < 0.0) fail("ADSR times must be non-negative");
    if (e.attack + e.decay + e.release > 1.0) fail("attack + decay + release exceed the duration");
    if (e.sustain_level < 0.0 || e.sustain_level > 1.0) fail("sustain_level must be in [0, 1]");
}

double ramp(double start, double end, double t, double dur)
{
    if (!(dur > 0.0)) throw std::invalid_argument("ramp duration must be positive");
    if (t < 0.0 || t > dur) throw std::invalid_argument("ramp time outside [0, dur]");
    return start + (end - start) * (t / dur);
}

AudioBuffer render_voice(const VoicePatch& patch, const RenderSettings& settings)
{
    validate_patch(patch);
    if (settings.sample_rate < 8000) throw std::invalid_argument("sample_rate must be >= 8000");

    const double sr = settings.sample_rate;
    const auto n = static_cast<std::size_t>(std::llround(patch.dur * sr));
    AudioBuffer buffer;
    buffer.sample_rate = settings.sample_rate;
    buffer.samples.assign(n, 0.0);
    if (n == 0 || patch.ldns == 0.0) return buffer;

    // Grain onsets: one per period of the vibrato-modulated fundamental.
    std::vector<std::size_t> onsets;
    double phase = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sr;
        if (phase >= 1.0) {
            phase -= 1.0;
            onsets.push_back(i);
        }
        const double vibrato =
            1.0 + patch.vibrato_depth * std::sin(2.0 * std::numbers::pi * patch.vibrato_rate * t);
        phase += ramp(patch.fnd_start, patch.fnd_end, t, patch.dur) * vibrato / sr;
    }

    // Each generator renders into its own track; tracks are summed in order.
    std::vector<double> mix(n, 0.0);
    std::vector<double> track(n);
    for (const auto& f : patch.formants) {
        std::fill(track.begin(), track.end(), 0.0);
        for (std::size_t onset : onsets) {
            const double t = static_cast<double>(onset) / sr;
            const double freq = ramp(f.fq_start, f.fq_end, t, patch.dur);
            if (freq >= sr / 2.0) continue;
            const double gain = std::pow(10.0, ramp(f.amp_start, f.amp_end, t, patch.dur) / 20.0);
            add_grain(track, onset, freq, gain, ramp(f.bw_start, f.bw_end, t, patch.dur), sr);
        }
        for (std::size_t i = 0; i < n; ++i) mix[i] += track[i];
    }

    double peak = 0.0;
    for (double s : mix) peak = std::max(peak, std::abs(s));
    const double norm = peak > 0.0 ? 1.0 / peak : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sr;
        buffer.samples[i] = mix[i] * norm * patch.ldns * adsr_gain(patch.adsr, t, patch.dur);
    }
    return buffer;
}

AudioBuffer concatenate(const std::vector<AudioBuffer>& buffers)
{
    AudioBuffer out;
    if (buffers.empty()) return out;
    out.sample_rate = buffers.front().sample_rate;
    for (const auto& b : buffers) {
        if (b.sample_rate != out.sample_rate) {
            throw std::invalid_argument("cannot concatenate buffers with different sample rates");
        }
        out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
    }
    return out;
}

std::vector<unsigned char> wav_bytes(const AudioBuffer& buffer)
{
    if (buffer.samples.empty()) throw std::invalid_argument("cannot write an empty buffer");
    const auto data_size = static_cast<std::uint32_t>(buffer.samples.size() * 2);
    const auto rate = static_cast<std::uint32_t>(buffer.sample_rate);

    std::vector<unsigned char> out;
    out.reserve(44 + data_size);
    auto tag = [&](const char* s) { out.insert(out.end(), s, s + 4); };
    auto u16 = [&](std::uint16_t v) {
        out.push_back(static_cast<unsigned char>(v & 0xFF));
        out.push_back(static_cast<unsigned char>(v >> 8));
    };
    auto u32 = [&](std::uint32_t v) {
        for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<unsigned char>(v >> shift));
    };

    tag("RIFF");
    u32(36 + data_size);
    tag("WAVE");
    tag("fmt ");
    u32(16);
    u16(1);        // PCM
    u16(1);        // mono
    u32(rate);
    u32(rate * 2); // byte rate
    u16(2);        // block align
    u16(16);
    tag("data");
    u32(data_size);
    for (double s : buffer.samples) {
        const double clamped = std::clamp(s, -1.0, 1.0);
        u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(clamped * 32767.0))));
    }
    return out;
}

void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path)
{
    const auto bytes = wav_bytes(buffer);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw FileError("cannot open " + path.string() + " for writing");
    file.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!file) throw FileError("write to " + path.string() + " failed");
}

} // namespace qmuse::voice
