#include "qmuse/hyperdie.hpp"

#include <regex>
#include <set>
#include <stdexcept>

#include "qmuse/errors.hpp"

namespace qmuse::hyperdie {

std::string DieMeasurement::to_string() const
{
    std::string s;
    for (int b : bits) s.push_back(b ? '1' : '0');
    return s;
}

DieMeasurement DieMeasurement::from_string(const std::string& text)
{
    if (text.size() != kDieQubits) {
        throw std::invalid_argument("die measurement needs 9 bits, got '" + text + "'");
    }
    DieMeasurement m;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '0' && text[i] != '1') {
            throw std::invalid_argument("die measurement '" + text + "' is not binary");
        }
        m.bits[i] = text[i] == '1';
    }
    return m;
}

DieMeasurement DieMeasurement::from_index(unsigned outcome)
{
    if (outcome >= (1u << kDieQubits)) throw std::invalid_argument("die outcome out of range");
    return from_string(qsim::to_bitstring(outcome, kDieQubits));
}

ParameterBank default_bank()
{
    ParameterBank bank;
    auto& f = bank.families;
    f["fnd"] = {277.2, 185.0, 207.6, 415.3, 155.6, 311.2, 369.9, 233.1};
    f["dur"] = {3.25, 2.0, 2.75, 4.0, 1.5, 3.75, 2.5, 4.5};
    f["fq1"] = {310.0, 270.0, 290.0, 350.0, 650.0, 400.0, 430.0, 470.0};
    f["fq2"] = {600.0, 1150.0, 800.0, 1870.0, 1080.0, 1620.0, 1700.0, 1040.0};
    f["fq3"] = {2250.0, 2100.0, 2800.0, 2650.0, 2500.0, 2900.0, 2600.0, 2750.0};
    f["amp1"] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    f["amp2"] = {-15, -7, -11, -6, -14, -9, -20, -30};
    f["amp3"] = {-9, -21, -12, -32, -17, -16, -10, -18};
    f["bw1"] = {35, 60, 45, 70, 80, 75, 58, 85};
    f["bw2"] = {65, 70, 90, 75, 83, 95, 60, 87};
    f["bw3"] = {128, 115, 110, 112, 98, 104, 124, 120};
    return bank;
}

const std::vector<CodeRule>& default_rules()
{
    static const std::vector<CodeRule> rules = {
        {"fq1s", {8, 7, 6}},  {"fq1e", {6, 7, 8}},  {"fq2s", {5, 4, 3}},  {"fq2e", {3, 4, 5}},
        {"fq3s", {2, 1, 0}},  {"fq3e", {0, 1, 2}},  {"amp1s", {7, 6, 5}}, {"amp1e", {5, 6, 7}},
        {"amp2s", {4, 3, 2}}, {"amp2e", {2, 3, 4}}, {"amp3s", {8, 5, 2}}, {"amp3e", {2, 5, 8}},
        {"bw1s", {7, 4, 3}},  {"bw1e", {3, 4, 7}},  {"bw2s", {6, 3, 0}},  {"bw2e", {0, 3, 6}},
        {"bw3s", {8, 7, 0}},  {"bw3e", {0, 7, 8}},  {"fnds", {8, 1, 0}},  {"fnde", {0, 1, 8}},
        {"dur", {5, 3, 1}},
    };
    return rules;
}

std::string family_of(const std::string& key)
{
    static const std::regex ramped(R"((fq|amp|bw)[1-5][se]|fnd[se])");
    if (std::regex_match(key, ramped)) return key.substr(0, key.size() - 1);
    return key;
}

void validate_rules(const std::vector<CodeRule>& rules)
{
    std::set<std::string> seen;
    for (const auto& rule : rules) {
        for (int label : rule.triple) {
            if (label < 0 || label >= kDieQubits) {
                throw ConfigError("rule '" + rule.key + "' uses measurement index " +
                                  std::to_string(label) + ", expected 0..8");
            }
        }
        if (!seen.insert(rule.key).second) throw ConfigError("duplicate rule for '" + rule.key + "'");
    }
}

qsim::Circuit die_circuit(bool with_hadamards)
{
    qsim::Circuit c;
    c.num_qubits = kDieQubits;
    for (int q = 0; q < kDieQubits; ++q) {
        if (with_hadamards) c.gates.push_back(qsim::Gate::h(q));
        c.measured_qubits.push_back(q);
    }
    return c;
}

DieMeasurement roll_die(qsim::Backend& backend, std::uint64_t seed, const qsim::Circuit& circuit)
{
    const auto counts = backend.execute(circuit, 1, seed);
    if (counts.total_shots != 1 || counts.histogram.size() != 1) {
        throw std::runtime_error("die backend returned an unexpected histogram");
    }
    return DieMeasurement::from_string(counts.histogram.begin()->first);
}

int assemble_code(const DieMeasurement& meas, const std::array<int, 3>& triple)
{
    int code = 0;
    for (int label : triple) {
        if (label < 0 || label >= kDieQubits) {
            throw std::invalid_argument("measurement index " + std::to_string(label) + " outside 0..8");
        }
        code = (code << 1) | meas.c(label);
    }
    return code;
}

voice::VoicePatch retrieve_patch(const DieMeasurement& meas, const ParameterBank& bank,
                                 const std::vector<CodeRule>& rules, const voice::VoicePatch& base)
{
    validate_rules(rules);
    voice::VoicePatch patch = base;
    for (const auto& rule : rules) {
        const auto family = bank.families.find(family_of(rule.key));
        if (family == bank.families.end()) {
            throw ConfigError("no parameter list for '" + rule.key + "' in the bank");
        }
        voice::set_parameter(patch, rule.key,
                             family->second[static_cast<std::size_t>(assemble_code(meas, rule.triple))]);
    }
    return patch;
}

} // namespace qmuse::hyperdie
