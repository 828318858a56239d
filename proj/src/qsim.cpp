#include "qmuse/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qmuse/rng.hpp"

namespace qmuse::qsim {

namespace {

void check_qubit_count(int num_qubits)
{
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw std::invalid_argument("qubit count must be in 1.." + std::to_string(kMaxQubits) +
                                    ", got " + std::to_string(num_qubits));
    }
}

std::size_t parse_code(std::string_view code, int num_qubits)
{
    if (code.size() != static_cast<std::size_t>(num_qubits)) {
        throw std::invalid_argument("basis code '" + std::string(code) + "' does not have " +
                                    std::to_string(num_qubits) + " bits");
    }
    std::size_t index = 0;
    for (char c : code) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("basis code '" + std::string(code) + "' is not binary");
        }
        index = (index << 1) | static_cast<std::size_t>(c == '1');
    }
    return index;
}

} // namespace

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits)
{
    check_qubit_count(num_qubits);
    amplitudes_.assign(std::size_t{1} << num_qubits, Amplitude{});
    amplitudes_[0] = 1.0;
}

double StateVector::norm_squared() const noexcept
{
    double sum = 0.0;
    for (const auto& a : amplitudes_) sum += std::norm(a);
    return sum;
}

std::vector<double> StateVector::probabilities() const
{
    std::vector<double> p(amplitudes_.size());
    std::transform(amplitudes_.begin(), amplitudes_.end(), p.begin(),
                   [](const Amplitude& a) { return std::norm(a); });
    return p;
}

StateVector StateVector::from_amplitudes(int num_qubits, std::vector<Amplitude> amplitudes)
{
    StateVector state(num_qubits);
    if (amplitudes.size() != state.dimension()) {
        throw std::invalid_argument("amplitude vector has wrong length");
    }
    double norm = 0.0;
    for (const auto& a : amplitudes) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw std::invalid_argument("amplitudes must be finite");
        }
        norm += std::norm(a);
    }
    if (norm == 0.0) throw std::invalid_argument("zero state vector");
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& a : amplitudes) a *= scale;
    state.amplitudes_ = std::move(amplitudes);
    return state;
}

void StateVector::apply_single(int target, const std::array<Amplitude, 4>& m)
{
    const std::size_t stride = std::size_t{1} << target;
    for (std::size_t base = 0; base < amplitudes_.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Amplitude a0 = amplitudes_[i];
            const Amplitude a1 = amplitudes_[i + stride];
            amplitudes_[i] = m[0] * a0 + m[1] * a1;
            amplitudes_[i + stride] = m[2] * a0 + m[3] * a1;
        }
    }
}

void StateVector::apply_controlled_x(std::span<const int> controls, int target)
{
    std::size_t control_mask = 0;
    for (int c : controls) control_mask |= std::size_t{1} << c;
    const std::size_t target_bit = std::size_t{1} << target;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
        // Visit each pair once, from its target=0 member.
        if ((i & target_bit) == 0 && (i & control_mask) == control_mask) {
            std::swap(amplitudes_[i], amplitudes_[i | target_bit]);
        }
    }
}

std::string_view to_string(GateKind kind)
{
    switch (kind) {
    case GateKind::X: return "X";
    case GateKind::H: return "H";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CX: return "CX";
    case GateKind::CCX: return "CCX";
    }
    return "?";
}

GateKind gate_kind_from_string(std::string_view name)
{
    for (auto kind : {GateKind::X, GateKind::H, GateKind::RX, GateKind::RY, GateKind::RZ,
                      GateKind::CX, GateKind::CCX}) {
        if (to_string(kind) == name) return kind;
    }
    throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

std::array<Amplitude, 4> single_qubit_matrix(GateKind kind, double theta)
{
    using namespace std::complex_literals;
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    switch (kind) {
    case GateKind::X: return {0.0, 1.0, 1.0, 0.0};
    case GateKind::H: {
        const double r = std::numbers::sqrt2 / 2.0;
        return {r, r, r, -r};
    }
    case GateKind::RX: return {c, -1i * s, -1i * s, c};
    case GateKind::RY: return {c, -s, s, c};
    case GateKind::RZ: return {std::polar(1.0, -theta / 2.0), 0.0, 0.0, std::polar(1.0, theta / 2.0)};
    default: break;
    }
    throw std::invalid_argument("gate " + std::string(to_string(kind)) + " is not a single-qubit gate");
}

void validate_gate(const Gate& gate, int num_qubits)
{
    std::size_t expected_controls = 0;
    if (gate.kind == GateKind::CX) expected_controls = 1;
    if (gate.kind == GateKind::CCX) expected_controls = 2;
    if (gate.controls.size() != expected_controls) {
        throw std::invalid_argument("gate " + std::string(to_string(gate.kind)) + " needs " +
                                    std::to_string(expected_controls) + " control(s)");
    }
    if (!std::isfinite(gate.theta)) throw std::invalid_argument("gate angle must be finite");

    auto check_index = [num_qubits](int q) {
        if (q < 0 || q >= num_qubits) {
            throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range for " +
                                        std::to_string(num_qubits) + " qubits");
        }
    };
    check_index(gate.target);
    for (std::size_t i = 0; i < gate.controls.size(); ++i) {
        check_index(gate.controls[i]);
        if (gate.controls[i] == gate.target) {
            throw std::invalid_argument("control and target coincide on qubit " +
                                        std::to_string(gate.target));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (gate.controls[i] == gate.controls[j]) {
                throw std::invalid_argument("duplicate control qubit " +
                                            std::to_string(gate.controls[i]));
            }
        }
    }
}

void validate_circuit(const Circuit& circuit)
{
    check_qubit_count(circuit.num_qubits);
    if (!circuit.initial_code.empty()) parse_code(circuit.initial_code, circuit.num_qubits);
    for (const auto& gate : circuit.gates) validate_gate(gate, circuit.num_qubits);
    if (circuit.measured_qubits.empty()) {
        throw std::invalid_argument("circuit measures no qubits");
    }
    std::vector<bool> seen(static_cast<std::size_t>(circuit.num_qubits), false);
    for (int q : circuit.measured_qubits) {
        if (q < 0 || q >= circuit.num_qubits) {
            throw std::invalid_argument("measured qubit " + std::to_string(q) + " out of range");
        }
        if (seen[static_cast<std::size_t>(q)]) {
            throw std::invalid_argument("qubit " + std::to_string(q) + " measured twice");
        }
        seen[static_cast<std::size_t>(q)] = true;
    }
}

StateVector prepare_basis(int num_qubits, std::string_view code)
{
    StateVector state(num_qubits);
    const std::size_t index = parse_code(code, num_qubits);
    state.amplitudes_[0] = 0.0;
    state.amplitudes_[index] = 1.0;
    return state;
}

StateVector apply_gate(StateVector state, const Gate& gate)
{
    validate_gate(gate, state.num_qubits());
    switch (gate.kind) {
    case GateKind::CX:
    case GateKind::CCX: state.apply_controlled_x(gate.controls, gate.target); break;
    default: state.apply_single(gate.target, single_qubit_matrix(gate.kind, gate.theta)); break;
    }
    return state;
}

StateVector simulate(const Circuit& circuit)
{
    validate_circuit(circuit);
    StateVector state = circuit.initial_code.empty()
                            ? StateVector(circuit.num_qubits)
                            : prepare_basis(circuit.num_qubits, circuit.initial_code);
    for (const auto& gate : circuit.gates) state = apply_gate(std::move(state), gate);
    return state;
}

std::vector<double> measurement_distribution(const Circuit& circuit)
{
    const StateVector state = simulate(circuit);
    const auto& measured = circuit.measured_qubits;
    std::vector<double> dist(std::size_t{1} << measured.size(), 0.0);
    for (std::size_t i = 0; i < state.dimension(); ++i) {
        std::size_t outcome = 0;
        for (std::size_t k = 0; k < measured.size(); ++k) {
            outcome |= ((i >> measured[k]) & 1u) << k;
        }
        dist[outcome] += std::norm(state[i]);
    }
    return dist;
}

Counts run_circuit(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed)
{
    if (shots == 0) throw std::invalid_argument("invalid shots: must be at least 1");
    const auto dist = measurement_distribution(circuit);

    // Terminal measurement only, so every shot samples the same distribution.
    std::vector<double> cdf(dist.size());
    double running = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) cdf[i] = running += dist[i];
    std::size_t last_support = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i] > 0.0) last_support = i;
    }

    std::vector<std::uint64_t> tally(dist.size(), 0);
    Rng rng(seed);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * running;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        auto outcome = static_cast<std::size_t>(it - cdf.begin());
        // Rounding can leave u on the final plateau.
        if (outcome >= dist.size()) outcome = last_support;
        ++tally[outcome];
    }

    Counts counts;
    counts.total_shots = shots;
    const int width = static_cast<int>(circuit.measured_qubits.size());
    for (std::size_t i = 0; i < tally.size(); ++i) {
        if (tally[i] > 0) counts.histogram.emplace(to_bitstring(i, width), tally[i]);
    }
    return counts;
}

std::string most_frequent(const Counts& counts)
{
    if (counts.histogram.empty()) throw std::invalid_argument("counts are empty");
    // std::map iterates keys in ascending order; strict > keeps the first.
    auto best = counts.histogram.begin();
    for (auto it = counts.histogram.begin(); it != counts.histogram.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

std::string to_bitstring(std::uint64_t value, int width)
{
    std::string bits(static_cast<std::size_t>(width), '0');
    for (int k = 0; k < width; ++k) {
        if ((value >> k) & 1u) bits[static_cast<std::size_t>(width - 1 - k)] = '1';
    }
    return bits;
}

} // namespace qmuse::qsim
