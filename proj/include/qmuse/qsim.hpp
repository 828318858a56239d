#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qmuse::qsim {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 12;

// Bitstrings crossing this module's boundary are written most-significant
// qubit first: "q2q1q0". Qubit i carries weight 2^i in a basis index.

/// Dense state vector over `num_qubits` qubits.
class StateVector {
public:
    /// |0...0>.
    explicit StateVector(int num_qubits);

    int num_qubits() const noexcept { return num_qubits_; }
    std::size_t dimension() const noexcept { return amplitudes_.size(); }
    std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }
    const Amplitude& operator[](std::size_t index) const { return amplitudes_[index]; }

    /// Σ|a_i|².
    double norm_squared() const noexcept;
    std::vector<double> probabilities() const;

    /// Used by tests to build arbitrary states; renormalizes.
    static StateVector from_amplitudes(int num_qubits, std::vector<Amplitude> amplitudes);

    // Raw gate kernels. Indices are validated by apply_gate(), not here.
    void apply_single(int target, const std::array<Amplitude, 4>& matrix);
    void apply_controlled_x(std::span<const int> controls, int target);

private:
    int num_qubits_;
    std::vector<Amplitude> amplitudes_;

    friend StateVector prepare_basis(int num_qubits, std::string_view code);
};

enum class GateKind { X, H, RX, RY, RZ, CX, CCX };

std::string_view to_string(GateKind kind);
/// Accepts the names produced by to_string(); throws std::invalid_argument otherwise.
GateKind gate_kind_from_string(std::string_view name);

struct Gate {
    GateKind kind = GateKind::X;
    double theta = 0.0; // radians, rotations only
    int target = 0;
    std::vector<int> controls;

    static Gate x(int target) { return {GateKind::X, 0.0, target, {}}; }
    static Gate h(int target) { return {GateKind::H, 0.0, target, {}}; }
    static Gate rx(double theta, int target) { return {GateKind::RX, theta, target, {}}; }
    static Gate ry(double theta, int target) { return {GateKind::RY, theta, target, {}}; }
    static Gate rz(double theta, int target) { return {GateKind::RZ, theta, target, {}}; }
    static Gate cx(int control, int target) { return {GateKind::CX, 0.0, target, {control}}; }
    static Gate ccx(int control_a, int control_b, int target)
    {
        return {GateKind::CCX, 0.0, target, {control_a, control_b}};
    }

    bool operator==(const Gate&) const = default;
};

/// Row-major 2x2 unitary of a single-qubit gate kind.
std::array<Amplitude, 4> single_qubit_matrix(GateKind kind, double theta);

/// Throws std::invalid_argument if the gate does not fit a register of
/// `num_qubits` (wrong control count, out-of-range or repeated indices).
void validate_gate(const Gate& gate, int num_qubits);

struct Circuit {
    int num_qubits = 1;
    std::string initial_code;  // empty means all zeros
    std::vector<Gate> gates;
    std::vector<int> measured_qubits;

    bool operator==(const Circuit&) const = default;
};

void validate_circuit(const Circuit& circuit);

/// Shot histogram. Keys hold one character per measured qubit, with
/// measured_qubits[0] as the rightmost character.
struct Counts {
    std::map<std::string, std::uint64_t> histogram;
    std::uint64_t total_shots = 0;

    std::uint64_t operator[](const std::string& key) const
    {
        auto it = histogram.find(key);
        return it == histogram.end() ? 0 : it->second;
    }
    bool operator==(const Counts&) const = default;
};

StateVector prepare_basis(int num_qubits, std::string_view code);

StateVector apply_gate(StateVector state, const Gate& gate);

/// Final state of the circuit before measurement.
StateVector simulate(const Circuit& circuit);

/// Marginal distribution over measured outcomes, indexed by the integer value
/// of the outcome key.
std::vector<double> measurement_distribution(const Circuit& circuit);

Counts run_circuit(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed);

/// Key with the highest count; ties go to the lexicographically smallest key.
std::string most_frequent(const Counts& counts);

/// Executes circuits. Implementations must be deterministic in
/// (circuit, shots, seed) and safe to share between threads.
class Backend {
public:
    virtual ~Backend() = default;
    virtual Counts execute(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed) = 0;
};

/// In-process state-vector simulator.
class LocalBackend final : public Backend {
public:
    Counts execute(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed) override
    {
        return run_circuit(circuit, shots, seed);
    }
};

/// Renders an integer as a `width`-character bitstring, MSB first.
std::string to_bitstring(std::uint64_t value, int width);

} // namespace qmuse::qsim
