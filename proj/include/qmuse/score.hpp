#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qmuse::score {

struct NoteEvent {
    std::optional<int> pitch; // MIDI note number; empty for a rest
    double duration = 1.0;    // quarter notes
    int velocity = 96;

    static NoteEvent note(int pitch, double duration, int velocity = 96)
    {
        return {pitch, duration, velocity};
    }
    static NoteEvent rest(double duration) { return {std::nullopt, duration, 96}; }

    bool is_rest() const { return !pitch.has_value(); }
    bool operator==(const NoteEvent&) const = default;
};

struct Sequence {
    std::vector<NoteEvent> events;
    double tempo_bpm = 120.0;
};

inline constexpr int kDefaultTicksPerQuarter = 480;

/// Standard MIDI File, format 0, one track on channel 0 with program 0.
/// Event boundaries are rounded to the nearest tick from their exact
/// cumulative position, so rounding never accumulates. Rests are gaps.
std::vector<std::uint8_t> to_midi_bytes(const Sequence& seq, int ticks_per_quarter = kDefaultTicksPerQuarter);

/// Writes to_midi_bytes() verbatim. Nothing is created if encoding fails.
void write_midi(const Sequence& seq, const std::filesystem::path& path,
                int ticks_per_quarter = kDefaultTicksPerQuarter);

/// MIDI variable-length quantity; values up to 0x0FFFFFFF.
std::vector<std::uint8_t> encode_vlq(std::uint32_t value);

/// "C4" -> 60, "G#4" -> 68, "Eb3" -> 51. Throws std::invalid_argument.
int note_number(std::string_view name);
/// 61 -> "C#4".
std::string note_name(int midi);

} // namespace qmuse::score
