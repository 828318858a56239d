#include "qmuse/score.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "qmuse/errors.hpp"

namespace qmuse::score {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_delta(std::vector<std::uint8_t>& track, std::int64_t delta)
{
    if (delta < 0 || delta > 0x0FFFFFFF) throw std::invalid_argument("delta time out of MIDI range");
    const auto bytes = encode_vlq(static_cast<std::uint32_t>(delta));
    track.insert(track.end(), bytes.begin(), bytes.end());
}

void validate(const Sequence& seq, int tpq)
{
    if (seq.events.empty()) throw std::invalid_argument("cannot encode an empty sequence");
    if (tpq < 1 || tpq > 0x7FFF) throw std::invalid_argument("ticks per quarter must be in 1..32767");
    if (!(seq.tempo_bpm > 0.0) || 60'000'000.0 / seq.tempo_bpm > 0xFFFFFF) {
        throw std::invalid_argument("tempo out of range");
    }
    for (const auto& e : seq.events) {
        if (!(e.duration > 0.0) || !std::isfinite(e.duration)) {
            throw std::invalid_argument("event durations must be positive");
        }
        if (e.pitch && (*e.pitch < 0 || *e.pitch > 127)) {
            throw std::invalid_argument("pitch " + std::to_string(*e.pitch) + " outside 0..127");
        }
        if (e.velocity < 1 || e.velocity > 127) throw std::invalid_argument("velocity outside 1..127");
    }
}

} // namespace

std::vector<std::uint8_t> encode_vlq(std::uint32_t value)
{
    if (value > 0x0FFFFFFF) throw std::invalid_argument("value too large for a variable-length quantity");
    std::vector<std::uint8_t> bytes{static_cast<std::uint8_t>(value & 0x7F)};
    while ((value >>= 7) != 0) {
        bytes.insert(bytes.begin(), static_cast<std::uint8_t>(0x80 | (value & 0x7F)));
    }
    return bytes;
}

std::vector<std::uint8_t> to_midi_bytes(const Sequence& seq, int ticks_per_quarter)
{
    validate(seq, ticks_per_quarter);
    const double tpq = ticks_per_quarter;

    std::vector<std::uint8_t> track;
    const auto usec_per_quarter = static_cast<std::uint32_t>(std::lround(60'000'000.0 / seq.tempo_bpm));
    track.insert(track.end(), {0x00, 0xFF, 0x51, 0x03});
    track.push_back(static_cast<std::uint8_t>(usec_per_quarter >> 16));
    track.push_back(static_cast<std::uint8_t>(usec_per_quarter >> 8));
    track.push_back(static_cast<std::uint8_t>(usec_per_quarter));
    track.insert(track.end(), {0x00, 0xC0, 0x00}); // program 0, channel 0

    std::int64_t cursor = 0; // tick of the last written event
    double position = 0.0;   // quarters
    for (const auto& e : seq.events) {
        const auto start = std::llround(position * tpq);
        position += e.duration;
        const auto end = std::llround(position * tpq);
        if (e.is_rest()) continue;
        const auto key = static_cast<std::uint8_t>(*e.pitch);
        put_delta(track, start - cursor);
        track.insert(track.end(), {0x90, key, static_cast<std::uint8_t>(e.velocity)});
        put_delta(track, end - start);
        track.insert(track.end(), {0x80, key, 0x40});
        cursor = end;
    }
    put_delta(track, std::llround(position * tpq) - cursor);
    track.insert(track.end(), {0xFF, 0x2F, 0x00});

    std::vector<std::uint8_t> out{'M', 'T', 'h', 'd'};
    put_u32(out, 6);
    put_u16(out, 0); // format 0
    put_u16(out, 1); // one track
    put_u16(out, static_cast<std::uint16_t>(ticks_per_quarter));
    out.insert(out.end(), {'M', 'T', 'r', 'k'});
    put_u32(out, static_cast<std::uint32_t>(track.size()));
    out.insert(out.end(), track.begin(), track.end());
    return out;
}

void write_midi(const Sequence& seq, const std::filesystem::path& path, int ticks_per_quarter)
{
    const auto bytes = to_midi_bytes(seq, ticks_per_quarter);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw FileError("cannot open " + path.string() + " for writing");
    file.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!file) throw FileError("write to " + path.string() + " failed");
}

int note_number(std::string_view name)
{
    static constexpr int kSemitone[] = {9, 11, 0, 2, 4, 5, 7}; // A..G
    auto bad = [&] { return std::invalid_argument("bad note name '" + std::string(name) + "'"); };
    if (name.size() < 2) throw bad();
    const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    if (letter < 'A' || letter > 'G') throw bad();
    int semitone = kSemitone[letter - 'A'];
    std::size_t i = 1;
    for (; i < name.size() && (name[i] == '#' || name[i] == 'b'); ++i) semitone += name[i] == '#' ? 1 : -1;
    std::string_view octave_text = name.substr(i);
    if (octave_text.empty()) throw bad();
    int octave = 0;
    bool negative = false;
    std::size_t j = 0;
    if (octave_text[0] == '-') {
        negative = true;
        j = 1;
    }
    if (j >= octave_text.size()) throw bad();
    for (; j < octave_text.size(); ++j) {
        if (!std::isdigit(static_cast<unsigned char>(octave_text[j]))) throw bad();
        octave = octave * 10 + (octave_text[j] - '0');
        if (octave > 20) throw bad();
    }
    if (negative) octave = -octave;
    const int midi = (octave + 1) * 12 + semitone;
    if (midi < 0 || midi > 127) throw bad();
    return midi;
}

std::string note_name(int midi)
{
    static constexpr const char* kNames[] = {"C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};
    if (midi < 0 || midi > 127) throw std::invalid_argument("MIDI note out of range");
    return std::string(kNames[midi % 12]) + std::to_string(midi / 12 - 1);
}

} // namespace qmuse::score
