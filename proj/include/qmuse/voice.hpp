#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qmuse::voice {

inline constexpr int kFormantCount = 5;

/// Linear start-to-end track of one formant generator.
struct Formant {
    double fq_start = 0.0; // Hz
    double fq_end = 0.0;
    double amp_start = 0.0; // dB relative to formant 1, <= 0
    double amp_end = 0.0;
    double bw_start = 0.0; // Hz
    double bw_end = 0.0;
};

/// Attack/decay/release are fractions of the note duration, so the envelope
/// follows `dur` when the die changes it.
struct Adsr {
    double attack = 0.1;
    double decay = 0.1;
    double sustain_level = 0.8;
    double release = 0.2;
};

struct VoicePatch {
    std::array<Formant, kFormantCount> formants;
    double fnd_start = 0.0; // fundamental, Hz
    double fnd_end = 0.0;
    double dur = 1.0; // seconds
    double ldns = 0.8; // loudness, 0..1
    double vibrato_rate = 5.5; // Hz
    double vibrato_depth = 0.01; // fraction of the fundamental
    Adsr adsr;
};

/// Soprano /a/-like starting point: formants 4 and 5 at 3250/3700 Hz and
/// placeholder values for everything the die selects.
VoicePatch default_patch();

/// Sets a parameter by its short name: fq{1-5}{s,e}, amp{1-5}{s,e},
/// bw{1-5}{s,e}, fnds, fnde, dur, ldns, vibrato_rate, vibrato_depth,
/// attack, decay, sustain_level, release. Throws ConfigError for anything else.
void set_parameter(VoicePatch& patch, std::string_view key, double value);
double get_parameter(const VoicePatch& patch, std::string_view key);
/// Every name accepted by set_parameter(), in a stable order.
const std::vector<std::string>& parameter_names();

/// Throws std::invalid_argument naming the first violated constraint.
void validate_patch(const VoicePatch& patch);

struct RenderSettings {
    int sample_rate = 44100;
};

struct AudioBuffer {
    std::vector<double> samples; // [-1, 1]
    int sample_rate = 44100;

    double duration() const
    {
        return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
    }
};

/// start + (end - start) * t / dur, for t in [0, dur].
double ramp(double start, double end, double t, double dur);

/// FOF synthesis: five formant grain streams triggered at the vibrato-modulated
/// fundamental, summed, peak-normalized, then scaled by ldns and the ADSR.
AudioBuffer render_voice(const VoicePatch& patch, const RenderSettings& settings = {});

/// Joins buffers end to end. Sample rates must match.
AudioBuffer concatenate(const std::vector<AudioBuffer>& buffers);

/// Canonical 44-byte-header RIFF/WAVE, PCM16 LE mono. Samples are clamped to
/// [-1, 1], scaled by 32767 and rounded to nearest.
std::vector<unsigned char> wav_bytes(const AudioBuffer& buffer);
void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path);

} // namespace qmuse::voice
