#include "qmuse/qwalk.hpp"

#include <stdexcept>

#include "qmuse/rng.hpp"

namespace qmuse::qwalk {

CubeCode CubeCode::parse(const std::string& written)
{
    if (written.size() != 3) throw std::invalid_argument("cube code needs 3 bits, got '" + written + "'");
    CubeCode c;
    for (std::size_t i = 0; i < 3; ++i) {
        if (written[i] != '0' && written[i] != '1') {
            throw std::invalid_argument("cube code '" + written + "' is not binary");
        }
        c.bits[i] = written[i] == '1';
    }
    return c;
}

std::string CubeCode::to_string() const
{
    std::string s;
    for (int b : bits) s.push_back(b ? '1' : '0');
    return s;
}

CubeCode CubeCode::from_value(int value)
{
    if (value < 0 || value > 7) throw std::invalid_argument("cube code value outside 0..7");
    return CubeCode{{(value >> 2) & 1, (value >> 1) & 1, value & 1}};
}

int hamming_distance(const CubeCode& a, const CubeCode& b)
{
    int d = 0;
    for (std::size_t i = 0; i < 3; ++i) d += a.bits[i] != b.bits[i];
    return d;
}

CubeCode apply_die(const CubeCode& code, const DieOutcome& die)
{
    CubeCode out = code;
    if (die.d3 == 0 && die.d4 == 1) out.bits[0] ^= 1;
    if (die.d3 == 0 && die.d4 == 0) out.bits[1] ^= 1;
    if (die.d3 == 1 && die.d4 == 1) out.bits[2] ^= 1;
    return out;
}

qsim::Circuit build_walk_circuit(const CubeCode& code, std::optional<DieOutcome> forced)
{
    using qsim::Gate;
    qsim::Circuit c;
    c.num_qubits = 5;
    // Written q4 q3 q2 q1 q0.
    c.initial_code = std::string{forced && forced->d4 ? '1' : '0', forced && forced->d3 ? '1' : '0',
                                 code.bits[2] ? '1' : '0', code.bits[1] ? '1' : '0',
                                 code.bits[0] ? '1' : '0'};
    if (!forced) {
        c.gates.push_back(Gate::h(3));
        c.gates.push_back(Gate::h(4));
    }
    // q3=0, q4=1: invert q0.
    c.gates.push_back(Gate::x(3));
    c.gates.push_back(Gate::ccx(3, 4, 0));
    c.gates.push_back(Gate::x(3));
    // q3=0, q4=0: invert q1.
    c.gates.push_back(Gate::x(3));
    c.gates.push_back(Gate::x(4));
    c.gates.push_back(Gate::ccx(3, 4, 1));
    c.gates.push_back(Gate::x(4));
    c.gates.push_back(Gate::x(3));
    // q3=1, q4=1: invert q2.
    c.gates.push_back(Gate::ccx(3, 4, 2));
    c.measured_qubits = {0, 1, 2};
    return c;
}

CubeCode code_from_key(const std::string& key)
{
    if (key.size() != 3) throw std::invalid_argument("walk outcome key must have 3 bits");
    return CubeCode::parse(std::string(key.rbegin(), key.rend()));
}

CubeCode walk_step(qsim::Backend& backend, const CubeCode& code, std::uint64_t shots, std::uint64_t seed)
{
    if (shots == 0) throw std::invalid_argument("invalid shots: must be at least 1");
    return code_from_key(qsim::most_frequent(backend.execute(build_walk_circuit(code), shots, seed)));
}

PitchDictionary default_pitch_dictionary(int base)
{
    PitchDictionary dict{};
    for (int v = 0; v < 8; ++v) {
        const auto c = CubeCode::from_value(v);
        dict[static_cast<std::size_t>(v)] = base + c.bits[0] * 1 + c.bits[1] * 3 + c.bits[2] * 8;
    }
    return dict;
}

DurationDictionary default_duration_dictionary()
{
    DurationDictionary d{};
    auto set = [&](const char* code, double quarters, bool pause) {
        d[static_cast<std::size_t>(CubeCode::parse(code).value())] = {quarters, pause};
    };
    set("000", 1.0, false);
    set("011", 0.5, false);
    set("100", 2.0, false);
    set("110", 4.0, false);
    set("001", 1.0, true);
    set("010", 0.5, true);
    set("101", 2.0, true);
    set("111", 4.0, true);
    return d;
}

score::NoteEvent decode_note(const CubeCode& pitch, const CubeCode& duration,
                             const PitchDictionary& pitches, const DurationDictionary& durations,
                             int velocity)
{
    const auto& d = durations[static_cast<std::size_t>(duration.value())];
    if (d.pause) return score::NoteEvent::rest(d.quarters);
    return score::NoteEvent::note(pitches[static_cast<std::size_t>(pitch.value())], d.quarters, velocity);
}

Walk generate_sequence(const WalkConfig& config, qsim::Backend& backend)
{
    if (config.steps < 1) throw std::invalid_argument("walk needs at least one step");
    if (config.shots < 1) throw std::invalid_argument("invalid shots: must be at least 1");
    for (const auto& s : config.switches) {
        if (s.step < 1) throw std::invalid_argument("dictionary switch step must be >= 1");
    }

    Walk walk;
    walk.sequence.tempo_bpm = config.tempo_bpm;
    PitchDictionary pitches = config.pitch_dict;
    DurationDictionary durations = config.duration_dict;
    CubeCode pitch = config.initial_pitch;
    CubeCode duration = config.initial_duration;

    for (int step = 1; step <= config.steps; ++step) {
        for (const auto& s : config.switches) {
            if (s.step != step) continue;
            if (s.pitch) pitches = *s.pitch;
            if (s.duration) durations = *s.duration;
        }
        if (step > 1) {
            const auto stream = static_cast<std::uint64_t>(step) * 2;
            pitch = walk_step(backend, pitch, config.shots, derive_seed(config.seed, stream));
            duration = walk_step(backend, duration, config.shots, derive_seed(config.seed, stream + 1));
        }
        walk.pitch_codes.push_back(pitch);
        walk.duration_codes.push_back(duration);
        walk.sequence.events.push_back(decode_note(pitch, duration, pitches, durations, config.velocity));
    }
    return walk;
}

} // namespace qmuse::qwalk
