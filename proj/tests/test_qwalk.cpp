#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "qmuse/qwalk.hpp"

using namespace qmuse;
using namespace qmuse::qwalk;

namespace {

CubeCode code(const char* written) { return CubeCode::parse(written); }

// Flip mask per die outcome, in written q0q1q2 order.
std::string flip_mask(int d3, int d4)
{
    if (d3 == 0 && d4 == 1) return "100";
    if (d3 == 0 && d4 == 0) return "010";
    if (d3 == 1 && d4 == 1) return "001";
    return "000";
}

std::string xor_written(const std::string& a, const std::string& b)
{
    std::string out(3, '0');
    for (int i = 0; i < 3; ++i) out[i] = a[i] == b[i] ? '0' : '1';
    return out;
}

// Index into measurement_distribution: the outcome key is "q2q1q0".
std::size_t outcome_index(const CubeCode& c) { return c.bits[0] + 2 * c.bits[1] + 4 * c.bits[2]; }

std::string written(int v) { return CubeCode::from_value(v).to_string(); }

// Codes from the reference 24-step example, in order.
const char* kTablePitch[] = {"110", "010", "010", "110", "100", "100", "000", "000", "001", "000", "100", "100",
                             "000", "010", "011", "111", "011", "111", "111", "101", "001", "000", "000", "000"};
const char* kTableDuration[] = {"100", "110", "110", "100", "101", "001", "001", "000", "100", "000", "100", "110",
                                "010", "010", "011", "001", "001", "101", "101", "100", "000", "001", "101", "001"};

} // namespace

TEST_CASE("cube codes")
{
    const auto c = code("001");
    CHECK(c.bits == std::array<int, 3>{0, 0, 1});
    CHECK(c.to_string() == "001");
    CHECK(c.value() == 1);
    CHECK(code("100").value() == 4);
    for (int v = 0; v < 8; ++v) CHECK(CubeCode::from_value(v).value() == v);
    CHECK_THROWS_AS(CubeCode::parse("0011"), std::invalid_argument);
    CHECK_THROWS_AS(CubeCode::parse("0a1"), std::invalid_argument);
    CHECK(hamming_distance(code("000"), code("111")) == 3);
    CHECK(hamming_distance(code("101"), code("100")) == 1);
    CHECK(code_from_key("001").to_string() == "100"); // key is q2q1q0
}

TEST_CASE("apply_die examples")
{
    CHECK(apply_die(code("001"), {0, 1}).to_string() == "101");
    CHECK(apply_die(code("001"), {0, 0}).to_string() == "011");
    CHECK(apply_die(code("111"), {1, 0}).to_string() == "111");
    CHECK(apply_die(code("111"), {1, 1}).to_string() == "110");
}

TEST_CASE("apply_die reaches the cube neighbours and itself")
{
    for (int v = 0; v < 8; ++v) {
        std::set<std::string> image;
        for (int d3 = 0; d3 < 2; ++d3) {
            for (int d4 = 0; d4 < 2; ++d4) {
                const auto out = apply_die(CubeCode::from_value(v), {d3, d4});
                CHECK(out.to_string() == xor_written(written(v), flip_mask(d3, d4)));
                image.insert(out.to_string());
            }
        }
        const std::set<std::string> expected = {written(v), xor_written(written(v), "100"),
                                                xor_written(written(v), "010"), xor_written(written(v), "001")};
        CHECK(image == expected);
    }
}

TEST_CASE("forced-die circuits agree with apply_die")
{
    int cases = 0;
    for (int v = 0; v < 8; ++v) {
        for (int d3 = 0; d3 < 2; ++d3) {
            for (int d4 = 0; d4 < 2; ++d4) {
                const auto c = CubeCode::from_value(v);
                const auto circuit = build_walk_circuit(c, DieOutcome{d3, d4});
                const auto counts = qsim::run_circuit(circuit, 16, 1);
                REQUIRE(counts.histogram.size() == 1);
                CHECK(code_from_key(counts.histogram.begin()->first) == apply_die(c, {d3, d4}));
                ++cases;
            }
        }
    }
    CHECK(cases == 32);
}

TEST_CASE("walk circuit shape")
{
    const auto c = build_walk_circuit(code("010"));
    CHECK(c.num_qubits == 5);
    CHECK(c.measured_qubits.size() == 3);
    CHECK(c.gates.at(0).kind == qsim::GateKind::H);
    CHECK(c.gates.at(1).kind == qsim::GateKind::H);
    for (const auto& g : c.gates) CHECK((g.kind == qsim::GateKind::H || g.kind == qsim::GateKind::X || g.kind == qsim::GateKind::CCX));
}

TEST_CASE("walk circuit spreads evenly over the four images")
{
    for (int v = 0; v < 8; ++v) {
        const auto c = CubeCode::from_value(v);
        const auto dist = qsim::measurement_distribution(build_walk_circuit(c));
        REQUIRE(dist.size() == 8);
        std::vector<double> expected(8, 0.0);
        for (int d3 = 0; d3 < 2; ++d3) {
            for (int d4 = 0; d4 < 2; ++d4) expected[outcome_index(apply_die(c, {d3, d4}))] += 0.25;
        }
        for (std::size_t i = 0; i < 8; ++i) {
            CAPTURE(v);
            CAPTURE(i);
            CHECK(std::abs(dist[i] - expected[i]) <= 1e-10);
        }
    }

    // support from 000 is exactly {000, 100, 010, 001}
    const auto dist = qsim::measurement_distribution(build_walk_circuit(code("000")));
    std::set<std::string> support;
    for (int i = 0; i < 8; ++i) {
        if (dist[static_cast<std::size_t>(i)] > 1e-12) support.insert(code_from_key(qsim::to_bitstring(i, 3)).to_string());
    }
    CHECK(support == std::set<std::string>{"000", "100", "010", "001"});
}

TEST_CASE("sampled walk frequencies")
{
    const auto counts = qsim::run_circuit(build_walk_circuit(code("000")), 4096, 2024);
    CHECK(counts.histogram.size() == 4);
    for (const auto& [key, n] : counts.histogram) {
        const double f = static_cast<double>(n) / 4096.0;
        CAPTURE(key);
        CHECK(f >= 0.22);
        CHECK(f <= 0.28);
    }
}

TEST_CASE("walk_step")
{
    qsim::LocalBackend backend;
    for (int v = 0; v < 8; ++v) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto from = CubeCode::from_value(v);
            const auto to = walk_step(backend, from, 4096, seed);
            CHECK(hamming_distance(from, to) <= 1);
            CHECK(walk_step(backend, from, 4096, seed) == to);
        }
    }
    std::set<std::string> seen;
    for (std::uint64_t seed = 0; seed < 200; ++seed) seen.insert(walk_step(backend, code("000"), 50, seed).to_string());
    CHECK(seen == std::set<std::string>{"000", "100", "010", "001"});
    CHECK_THROWS_AS(walk_step(backend, code("000"), 0, 1), std::invalid_argument);
}

TEST_CASE("dictionaries")
{
    const auto pitch = default_pitch_dictionary();
    CHECK(pitch[code("000").value()] == 60);
    CHECK(pitch[code("100").value()] == 61);
    CHECK(pitch[code("010").value()] == 63);
    CHECK(pitch[code("001").value()] == 68);
    CHECK(pitch[code("110").value()] == 64);
    CHECK(pitch[code("101").value()] == 69);
    CHECK(pitch[code("011").value()] == 71);
    CHECK(pitch[code("111").value()] == 72);
    CHECK(default_pitch_dictionary(48)[code("010").value()] == 51); // D#3

    const auto dur = default_duration_dictionary();
    std::set<std::string> pauses;
    for (int v = 0; v < 8; ++v) {
        if (dur[static_cast<std::size_t>(v)].pause) pauses.insert(written(v));
    }
    CHECK(pauses == std::set<std::string>{"001", "010", "101", "111"});
    CHECK(dur[code("000").value()] == DurationEntry{1.0, false});
    CHECK(dur[code("100").value()] == DurationEntry{2.0, false});
    CHECK(dur[code("011").value()] == DurationEntry{0.5, false});
    CHECK(dur[code("110").value()] == DurationEntry{4.0, false});
}

TEST_CASE("decoding the worked notes")
{
    const auto p = default_pitch_dictionary();
    const auto d = default_duration_dictionary();
    CHECK(decode_note(code("001"), code("000"), p, d) == score::NoteEvent::note(68, 1.0));
    CHECK(decode_note(code("000"), code("100"), p, d) == score::NoteEvent::note(60, 2.0));
    CHECK(decode_note(code("011"), code("111"), p, d) == score::NoteEvent::rest(4.0));
    CHECK(decode_note(code("000"), code("000"), p, d, 50).velocity == 50);
}

TEST_CASE("reference code columns satisfy the adjacency invariant")
{
    for (int i = 1; i < 24; ++i) {
        CAPTURE(i);
        CHECK(hamming_distance(code(kTablePitch[i - 1]), code(kTablePitch[i])) <= 1);
        CHECK(hamming_distance(code(kTableDuration[i - 1]), code(kTableDuration[i])) <= 1);
    }
}

TEST_CASE("generated sequences")
{
    qsim::LocalBackend backend;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        WalkConfig cfg;
        cfg.steps = 24;
        cfg.shots = 500;
        cfg.initial_pitch = code("110");
        cfg.initial_duration = code("100");
        cfg.seed = seed;
        const auto walk = generate_sequence(cfg, backend);
        REQUIRE(walk.sequence.events.size() == 24);
        REQUIRE(walk.pitch_codes.size() == 24);
        REQUIRE(walk.duration_codes.size() == 24);
        CHECK(walk.pitch_codes[0] == cfg.initial_pitch);
        CHECK(walk.duration_codes[0] == cfg.initial_duration);
        for (std::size_t i = 0; i < 24; ++i) {
            if (i > 0) {
                CHECK(hamming_distance(walk.pitch_codes[i - 1], walk.pitch_codes[i]) <= 1);
                CHECK(hamming_distance(walk.duration_codes[i - 1], walk.duration_codes[i]) <= 1);
            }
            CHECK(walk.sequence.events[i] ==
                  decode_note(walk.pitch_codes[i], walk.duration_codes[i], cfg.pitch_dict, cfg.duration_dict));
        }
        CHECK(generate_sequence(cfg, backend).pitch_codes == walk.pitch_codes);
    }
}

TEST_CASE("pauses keep the pitch walk going")
{
    qsim::LocalBackend backend;
    WalkConfig cfg;
    cfg.steps = 200;
    cfg.shots = 20;
    cfg.seed = 3;
    const auto walk = generate_sequence(cfg, backend);
    int rests = 0;
    for (std::size_t i = 1; i < walk.pitch_codes.size(); ++i) {
        if (walk.sequence.events[i - 1].is_rest()) {
            ++rests;
            CHECK(hamming_distance(walk.pitch_codes[i - 1], walk.pitch_codes[i]) <= 1);
        }
    }
    CHECK(rests > 0);
    // a rest's pitch code differs from its predecessor's somewhere in the walk
    bool moved_during_rest = false;
    for (std::size_t i = 1; i < walk.pitch_codes.size(); ++i) {
        moved_during_rest |= walk.sequence.events[i].is_rest() && walk.pitch_codes[i] != walk.pitch_codes[i - 1];
    }
    CHECK(moved_during_rest);
}

TEST_CASE("dictionary switches apply from their step onwards")
{
    qsim::LocalBackend backend;
    WalkConfig cfg;
    cfg.steps = 40;
    cfg.shots = 30;
    cfg.seed = 8;
    PitchDictionary high{};
    high.fill(90);
    DurationDictionary plain{};
    plain.fill(DurationEntry{0.25, false});
    cfg.switches = {{10, high, std::nullopt}, {20, std::nullopt, plain}};
    const auto walk = generate_sequence(cfg, backend);
    for (int i = 0; i < 40; ++i) {
        const auto& e = walk.sequence.events[static_cast<std::size_t>(i)];
        const int step = i + 1;
        CAPTURE(step);
        if (step >= 10 && !e.is_rest()) CHECK(*e.pitch == 90);
        if (step < 10 && !e.is_rest()) CHECK(*e.pitch < 90);
        if (step >= 20) {
            CHECK_FALSE(e.is_rest());
            CHECK(e.duration == 0.25);
        }
    }
    cfg.steps = 0;
    CHECK_THROWS_AS(generate_sequence(cfg, backend), std::invalid_argument);
}
