#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qmuse/qsim.hpp"
#include "qmuse/voice.hpp"

namespace qmuse::hyperdie {

inline constexpr int kDieQubits = 9;

/// One roll of the die. bits[0] is C8, bits[8] is C0; C_i is qubit q_i.
struct DieMeasurement {
    std::array<int, kDieQubits> bits{};

    /// Value of C_label.
    int c(int label) const { return bits.at(static_cast<std::size_t>(kDieQubits - 1 - label)); }

    /// "C8...C0", e.g. "000001001".
    std::string to_string() const;
    /// Inverse of to_string(); also the key format produced by the circuit.
    static DieMeasurement from_string(const std::string& bits);
    /// Bits of `outcome` (0..511) with C0 as the least significant bit.
    static DieMeasurement from_index(unsigned outcome);

    bool operator==(const DieMeasurement&) const = default;
};

/// Parameter `key` reads its index from (C_i, C_j, C_k), C_i most significant.
struct CodeRule {
    std::string key;
    std::array<int, 3> triple{};
};

/// Eight candidate values per family: fnd, dur, fq1..3, amp1..3, bw1..3, or
/// any other voice parameter family (fq4, bw5, ...).
struct ParameterBank {
    std::map<std::string, std::array<double, 8>> families;
};

/// The example database: fundamentals, durations and three formants.
ParameterBank default_bank();

/// The 21 canonical code assignments (fq1s <- C8C7C6, fq1e <- C6C7C8, ...).
const std::vector<CodeRule>& default_rules();

/// Family a parameter key reads from: "fq2e" -> "fq2", "fnds" -> "fnd", "dur" -> "dur".
std::string family_of(const std::string& key);

/// Throws ConfigError on bad triples or duplicate keys.
void validate_rules(const std::vector<CodeRule>& rules);

/// 9 qubits, optionally a Hadamard on each, all measured.
qsim::Circuit die_circuit(bool with_hadamards = true);

/// Executes `circuit` for one shot and returns its bits.
DieMeasurement roll_die(qsim::Backend& backend, std::uint64_t seed,
                        const qsim::Circuit& circuit = die_circuit());

/// 4*C_i + 2*C_j + C_k.
int assemble_code(const DieMeasurement& meas, const std::array<int, 3>& triple);

/// `base` with every rule's parameter replaced by bank[family][code].
voice::VoicePatch retrieve_patch(const DieMeasurement& meas, const ParameterBank& bank,
                                 const std::vector<CodeRule>& rules,
                                 const voice::VoicePatch& base = voice::default_patch());

} // namespace qmuse::hyperdie
