#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmuse/qsim.hpp"
#include "qmuse/score.hpp"

namespace qmuse::qwalk {

/// Cube vertex, written "q0q1q2" (q0 leftmost).
struct CubeCode {
    std::array<int, 3> bits{}; // q0, q1, q2

    static CubeCode parse(const std::string& written);
    std::string to_string() const;
    /// The written form read as binary, 0..7; indexes dictionaries.
    int value() const { return bits[0] * 4 + bits[1] * 2 + bits[2]; }
    static CubeCode from_value(int value);

    bool operator==(const CubeCode&) const = default;
};

int hamming_distance(const CubeCode& a, const CubeCode& b);

struct DieOutcome {
    int d3 = 0;
    int d4 = 0;
};

/// (0,1) flips q0, (0,0) flips q1, (1,1) flips q2, (1,0) stays put.
CubeCode apply_die(const CubeCode& code, const DieOutcome& die);

/// Five qubits: q0..q2 armed with `code`, Hadamards on the die qubits q3 and
/// q4, then Toffoli-controlled inversions; only q0..q2 are measured. A
/// `forced` die replaces the Hadamards with a basis preparation.
qsim::Circuit build_walk_circuit(const CubeCode& code, std::optional<DieOutcome> forced = std::nullopt);

/// Outcome key of the walk circuit ("q2q1q0") as a cube code.
CubeCode code_from_key(const std::string& key);

/// Runs the walk circuit and keeps the most frequent outcome.
CubeCode walk_step(qsim::Backend& backend, const CubeCode& code, std::uint64_t shots, std::uint64_t seed);

using PitchDictionary = std::array<int, 8>; // by CubeCode::value()

struct DurationEntry {
    double quarters = 1.0;
    bool pause = false;
    bool operator==(const DurationEntry&) const = default;
};
using DurationDictionary = std::array<DurationEntry, 8>;

/// Semitones above `base`: q0 adds 1, q1 adds 3, q2 adds 8 (000=C4, 001=G#4).
PitchDictionary default_pitch_dictionary(int base = 60);
/// Notes 000=1, 011=0.5, 100=2, 110=4 quarters; pauses 001=1, 010=0.5, 101=2, 111=4.
DurationDictionary default_duration_dictionary();

/// Replaces dictionaries from event `step` (1-based) onwards.
struct DictionarySwitch {
    int step = 1;
    std::optional<PitchDictionary> pitch;
    std::optional<DurationDictionary> duration;
};

struct WalkConfig {
    int steps = 24;
    std::uint64_t shots = 500;
    CubeCode initial_pitch = CubeCode::parse("000");
    CubeCode initial_duration = CubeCode::parse("100");
    PitchDictionary pitch_dict = default_pitch_dictionary();
    DurationDictionary duration_dict = default_duration_dictionary();
    std::vector<DictionarySwitch> switches;
    std::uint64_t seed = 0;
    int velocity = 96;
    double tempo_bpm = 120.0;
};

/// Decodes one (pitch, duration) code pair into a note or rest.
score::NoteEvent decode_note(const CubeCode& pitch, const CubeCode& duration,
                             const PitchDictionary& pitches, const DurationDictionary& durations,
                             int velocity = 96);

struct Walk {
    score::Sequence sequence;
    std::vector<CubeCode> pitch_codes;
    std::vector<CubeCode> duration_codes;
};

/// Event 1 is the initial note; every later event walks the pitch code and
/// then the duration code one step from the previous event's codes.
Walk generate_sequence(const WalkConfig& config, qsim::Backend& backend);

} // namespace qmuse::qwalk
