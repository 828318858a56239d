#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "qmuse/qsim.hpp"

using namespace qmuse::qsim;
using Matrix = std::vector<std::vector<Amplitude>>;

namespace {

constexpr double kTol = 1e-10;

// Dense-matrix oracle: builds the full 2^n unitary independently of the
// simulator's strided kernels.
Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.size() * b.size(), std::vector<Amplitude>(a.size() * b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            for (std::size_t k = 0; k < b.size(); ++k)
                for (std::size_t l = 0; l < b.size(); ++l)
                    out[i * b.size() + k][j * b.size() + l] = a[i][j] * b[k][l];
    return out;
}

Matrix oracle_matrix(const Gate& g, int n)
{
    const std::size_t dim = std::size_t{1} << n;
    if (g.kind == GateKind::CX || g.kind == GateKind::CCX) {
        Matrix m(dim, std::vector<Amplitude>(dim));
        for (std::size_t col = 0; col < dim; ++col) {
            bool fire = true;
            for (int c : g.controls) fire = fire && ((col >> c) & 1u);
            const std::size_t row = fire ? col ^ (std::size_t{1} << g.target) : col;
            m[row][col] = 1.0;
        }
        return m;
    }
    using namespace std::complex_literals;
    const double c = std::cos(g.theta / 2), s = std::sin(g.theta / 2);
    Matrix u;
    switch (g.kind) {
    case GateKind::X: u = {{0.0, 1.0}, {1.0, 0.0}}; break;
    case GateKind::H: u = {{1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}, {1 / std::sqrt(2.0), -1 / std::sqrt(2.0)}}; break;
    case GateKind::RX: u = {{c, -1i * s}, {-1i * s, c}}; break;
    case GateKind::RY: u = {{c, -s}, {s, c}}; break;
    case GateKind::RZ: u = {{std::exp(-0.5i * g.theta), 0.0}, {0.0, std::exp(0.5i * g.theta)}}; break;
    default: break;
    }
    // Kronecker order is q_{n-1} ⊗ ... ⊗ q_0.
    Matrix m = {{1.0}};
    const Matrix id = {{1.0, 0.0}, {0.0, 1.0}};
    for (int q = n - 1; q >= 0; --q) m = kron(m, q == g.target ? u : id);
    return m;
}

std::vector<Amplitude> matvec(const Matrix& m, std::span<const Amplitude> v)
{
    std::vector<Amplitude> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

StateVector random_state(int n, std::mt19937_64& gen)
{
    std::normal_distribution<double> normal;
    std::vector<Amplitude> amps(std::size_t{1} << n);
    for (auto& a : amps) a = {normal(gen), normal(gen)};
    return StateVector::from_amplitudes(n, std::move(amps));
}

Gate random_gate(int n, std::mt19937_64& gen)
{
    std::uniform_int_distribution<int> kind_pick(0, n >= 3 ? 6 : (n >= 2 ? 5 : 4));
    std::uniform_real_distribution<double> angle(-2 * std::numbers::pi, 2 * std::numbers::pi);
    std::vector<int> wires(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) wires[static_cast<std::size_t>(i)] = i;
    std::shuffle(wires.begin(), wires.end(), gen);
    switch (kind_pick(gen)) {
    case 0: return Gate::x(wires[0]);
    case 1: return Gate::h(wires[0]);
    case 2: return Gate::rx(angle(gen), wires[0]);
    case 3: return Gate::ry(angle(gen), wires[0]);
    case 4: return Gate::rz(angle(gen), wires[0]);
    case 5: return Gate::cx(wires[0], wires[1]);
    default: return Gate::ccx(wires[0], wires[1], wires[2]);
    }
}

std::size_t basis_index(const StateVector& s)
{
    for (std::size_t i = 0; i < s.dimension(); ++i) {
        if (std::abs(s[i] - Amplitude{1.0}) < kTol) return i;
    }
    FAIL("not a basis state");
    return 0;
}

} // namespace

TEST_CASE("prepare_basis places the amplitude at the coded index")
{
    auto s1 = prepare_basis(1, "0");
    CHECK(s1[0] == Amplitude{1.0});
    CHECK(s1[1] == Amplitude{0.0});

    auto s2 = prepare_basis(2, "00");
    CHECK(s2.dimension() == 4);
    CHECK(s2[0] == Amplitude{1.0});
    for (std::size_t i = 1; i < 4; ++i) CHECK(s2[i] == Amplitude{0.0});

    auto s3 = prepare_basis(3, "111");
    CHECK(s3[7] == Amplitude{1.0});
    CHECK(s3.norm_squared() == doctest::Approx(1.0));

    // leftmost character is the highest qubit
    CHECK(basis_index(prepare_basis(3, "100")) == 4);

    CHECK_THROWS_AS(prepare_basis(2, "0"), std::invalid_argument);
    CHECK_THROWS_AS(prepare_basis(2, "02"), std::invalid_argument);
    CHECK_THROWS_AS(prepare_basis(13, std::string(13, '0')), std::invalid_argument);
}

TEST_CASE("single-gate examples")
{
    CHECK(basis_index(apply_gate(prepare_basis(1, "0"), Gate::x(0))) == 1);

    auto h = apply_gate(prepare_basis(1, "0"), Gate::h(0));
    CHECK(std::abs(h[0] - Amplitude{1 / std::sqrt(2.0)}) < kTol);
    CHECK(std::abs(h[1] - Amplitude{1 / std::sqrt(2.0)}) < kTol);

    CHECK(basis_index(apply_gate(prepare_basis(2, "10"), Gate::cx(1, 0))) == 0b11);
    CHECK(basis_index(apply_gate(prepare_basis(3, "110"), Gate::ccx(2, 1, 0))) == 0b111);

    // RX(pi)|0> = -i|1>: X|0> up to a global phase
    auto rx = apply_gate(prepare_basis(1, "0"), Gate::rx(std::numbers::pi, 0));
    CHECK(std::abs(rx[0]) < kTol);
    CHECK(std::abs(std::abs(rx[1]) - 1.0) < kTol);
}

TEST_CASE("CX truth table matches the reference table exactly")
{
    const std::map<std::string, std::string> table = {{"00", "00"}, {"01", "01"}, {"10", "11"}, {"11", "10"}};
    for (const auto& [in, out] : table) {
        auto s = apply_gate(prepare_basis(2, in), Gate::cx(1, 0));
        CHECK(to_bitstring(basis_index(s), 2) == out);
        CHECK(s.norm_squared() == 1.0);
    }
}

TEST_CASE("Toffoli truth table matches the reference table exactly")
{
    const std::map<std::string, std::string> table = {
        {"000", "000"}, {"001", "001"}, {"010", "010"}, {"011", "011"},
        {"100", "100"}, {"101", "101"}, {"110", "111"}, {"111", "110"}};
    for (const auto& [in, out] : table) {
        auto s = apply_gate(prepare_basis(3, in), Gate::ccx(2, 1, 0));
        CHECK(to_bitstring(basis_index(s), 3) == out);
    }
}

TEST_CASE("every gate kind is unitary")
{
    const std::vector<std::pair<Gate, int>> gates = {
        {Gate::x(0), 1}, {Gate::h(0), 1}, {Gate::rx(0.7, 0), 1}, {Gate::ry(-2.1, 0), 1},
        {Gate::rz(1.3, 0), 1}, {Gate::cx(1, 0), 2}, {Gate::cx(0, 1), 2}, {Gate::ccx(2, 1, 0), 3},
        {Gate::ccx(0, 2, 1), 3}};
    for (const auto& [gate, n] : gates) {
        CAPTURE(to_string(gate.kind));
        const std::size_t dim = std::size_t{1} << n;
        // Column j of the unitary is the gate applied to basis state j.
        Matrix u(dim, std::vector<Amplitude>(dim));
        for (std::size_t j = 0; j < dim; ++j) {
            auto s = apply_gate(prepare_basis(n, to_bitstring(j, n)), gate);
            for (std::size_t i = 0; i < dim; ++i) u[i][j] = s[i];
        }
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                Amplitude dot{};
                for (std::size_t k = 0; k < dim; ++k) dot += std::conj(u[k][i]) * u[k][j];
                CHECK(std::abs(dot - Amplitude{i == j ? 1.0 : 0.0}) < kTol);
            }
        }
    }
}

TEST_CASE("simulator agrees with the dense Kronecker oracle on random states")
{
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 4;
        const auto state = random_state(n, gen);
        const auto gate = random_gate(n, gen);
        const auto fast = apply_gate(state, gate);
        const auto slow = matvec(oracle_matrix(gate, n), state.amplitudes());
        for (std::size_t i = 0; i < slow.size(); ++i) CHECK(std::abs(fast[i] - slow[i]) < kTol);
    }
}

TEST_CASE("self-inverse gates")
{
    std::mt19937_64 gen(7);
    const auto state = random_state(4, gen);
    for (const auto& g : {Gate::x(2), Gate::h(0), Gate::cx(3, 1), Gate::ccx(0, 3, 2)}) {
        const auto twice = apply_gate(apply_gate(state, g), g);
        for (std::size_t i = 0; i < state.dimension(); ++i) CHECK(std::abs(twice[i] - state[i]) < kTol);
    }
}

TEST_CASE("norm is conserved along random circuits")
{
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 5;
        auto state = random_state(n, gen);
        const int length = 1 + static_cast<int>(gen() % 100);
        for (int k = 0; k < length; ++k) {
            state = apply_gate(std::move(state), random_gate(n, gen));
            REQUIRE(std::abs(state.norm_squared() - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("invalid gates are rejected")
{
    auto s = prepare_basis(2, "00");
    CHECK_THROWS_AS(apply_gate(s, Gate::x(2)), std::invalid_argument);
    CHECK_THROWS_AS(apply_gate(s, Gate::x(-1)), std::invalid_argument);
    CHECK_THROWS_AS(apply_gate(s, Gate::cx(1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(apply_gate(prepare_basis(3, "000"), Gate::ccx(1, 1, 0)), std::invalid_argument);
    CHECK_THROWS_AS(apply_gate(s, Gate{GateKind::CX, 0.0, 0, {}}), std::invalid_argument);
    CHECK_THROWS_AS(apply_gate(s, Gate{GateKind::X, 0.0, 0, {1}}), std::invalid_argument);
    CHECK_THROWS_AS(gate_kind_from_string("SWAP"), std::invalid_argument);
}

TEST_CASE("run_circuit examples")
{
    Circuit x{1, "", {Gate::x(0)}, {0}};
    const auto cx = run_circuit(x, 10, 0);
    CHECK(cx.total_shots == 10);
    CHECK(cx.histogram == std::map<std::string, std::uint64_t>{{"1", 10}});

    Circuit h{1, "", {Gate::h(0)}, {0}};
    const auto ch = run_circuit(h, 10000, 3);
    CHECK(ch["0"] + ch["1"] == 10000);
    CHECK(ch["0"] >= 4850);
    CHECK(ch["0"] <= 5150);

    Circuit entangle{2, "10", {Gate::cx(1, 0)}, {0, 1}};
    for (std::uint64_t seed : {0u, 1u, 99u}) {
        CHECK(run_circuit(entangle, 25, seed).histogram == std::map<std::string, std::uint64_t>{{"11", 25}});
    }

    CHECK_THROWS_AS(run_circuit(h, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(run_circuit(Circuit{1, "", {}, {}}, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(run_circuit(Circuit{2, "", {}, {0, 0}}, 1, 0), std::invalid_argument);
}

TEST_CASE("counts keys put measured_qubits[0] rightmost")
{
    // only q0 set; measure q2, q0 in that order -> key "q0 q2" = "10"
    Circuit c{3, "001", {}, {2, 0}};
    CHECK(run_circuit(c, 3, 0).histogram == std::map<std::string, std::uint64_t>{{"10", 3}});
}

TEST_CASE("sampled frequencies converge to |amplitude|^2")
{
    Circuit c{3, "", {Gate::ry(0.9, 0), Gate::h(1), Gate::cx(1, 2), Gate::rx(2.2, 2), Gate::ry(0.4, 1)}, {0, 1, 2}};
    const auto probs = simulate(c).probabilities();
    const std::uint64_t shots = 100000;
    const auto counts = run_circuit(c, shots, 11);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double freq = static_cast<double>(counts[to_bitstring(i, 3)]) / static_cast<double>(shots);
        CHECK(std::abs(freq - probs[i]) < 0.01);
    }
}

TEST_CASE("run_circuit is deterministic per seed")
{
    Circuit c{4, "", {Gate::h(0), Gate::h(1), Gate::h(2), Gate::ry(0.3, 3)}, {0, 1, 2, 3}};
    CHECK(run_circuit(c, 500, 17) == run_circuit(c, 500, 17));
    CHECK_FALSE(run_circuit(c, 500, 17) == run_circuit(c, 500, 18));
    LocalBackend backend;
    CHECK(backend.execute(c, 500, 17) == run_circuit(c, 500, 17));
}

TEST_CASE("most_frequent")
{
    CHECK(most_frequent(Counts{{{"010", 60}, {"000", 40}}, 100}) == "010");
    CHECK(most_frequent(Counts{{{"111", 1}}, 1}) == "111");
    CHECK_THROWS_AS(most_frequent(Counts{}), std::invalid_argument);

    // tie-break oracle: smallest key among those with the maximal count
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 100; ++trial) {
        Counts c;
        for (int k = 0; k < 8; ++k) {
            const auto n = gen() % 4;
            if (n) c.histogram[to_bitstring(static_cast<std::uint64_t>(k), 3)] = n;
        }
        if (c.histogram.empty()) continue;
        std::uint64_t best = 0;
        for (const auto& [k, n] : c.histogram) best = std::max(best, n);
        std::vector<std::string> tied;
        for (const auto& [k, n] : c.histogram) if (n == best) tied.push_back(k);
        CHECK(most_frequent(c) == *std::min_element(tied.begin(), tied.end()));
    }
    CHECK(most_frequent(Counts{{{"000", 50}, {"100", 50}}, 100}) == "000");
}
