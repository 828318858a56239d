#pragma once

// JSON run configuration. Every section is optional:
//
// {
//   "bank":   {"fq1": [8 numbers], ...},           merged over the default bank
//   "rules":  [{"key": "fq1s", "triple": [8, 7, 6]}, ...],   replaces the rule set
//   "patch":  {"ldns": 0.7, "fq4s": 3300, "attack": 0.05, ...},
//   "walk":   {"pitch_dict": {"000": "C4", "001": 68, ...},
//              "duration_dict": {"000": {"quarters": 1, "pause": false}, ...},
//              "switches": [{"step": 12, "pitch_dict": {...}, "duration_dict": {...}}]},
//   "markov": {"labels": ["C4", ...], "rows": [[...], ...]}
// }

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmuse/hyperdie.hpp"
#include "qmuse/markov.hpp"
#include "qmuse/qwalk.hpp"

namespace qmuse::config {

struct Config {
    hyperdie::ParameterBank bank = hyperdie::default_bank();
    std::vector<hyperdie::CodeRule> rules = hyperdie::default_rules();
    std::map<std::string, double> patch_overrides;
    std::optional<qwalk::PitchDictionary> pitch_dict;
    std::optional<qwalk::DurationDictionary> duration_dict;
    std::vector<qwalk::DictionarySwitch> switches;
    std::optional<markov::TransitionMatrix> matrix;
};

/// Throws ConfigError with the offending path on schema violations.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::filesystem::path& path);

/// Default patch with `overrides` applied.
voice::VoicePatch base_patch(const Config& config);

} // namespace qmuse::config
