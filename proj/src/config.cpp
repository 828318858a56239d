#include "qmuse/config.hpp"

#include <fstream>

#include "qmuse/errors.hpp"
#include "qmuse/score.hpp"

namespace qmuse::config {

using nlohmann::json;

namespace {

qwalk::PitchDictionary parse_pitch_dict(const json& j)
{
    if (!j.is_object() || j.size() != 8) throw ConfigError("pitch_dict must map all 8 cube codes");
    qwalk::PitchDictionary dict{};
    for (const auto& [code, value] : j.items()) {
        const auto index = static_cast<std::size_t>(qwalk::CubeCode::parse(code).value());
        dict[index] = value.is_string() ? score::note_number(value.get<std::string>()) : value.get<int>();
        if (dict[index] < 0 || dict[index] > 127) throw ConfigError("pitch for " + code + " outside 0..127");
    }
    return dict;
}

qwalk::DurationDictionary parse_duration_dict(const json& j)
{
    if (!j.is_object() || j.size() != 8) throw ConfigError("duration_dict must map all 8 cube codes");
    qwalk::DurationDictionary dict{};
    for (const auto& [code, value] : j.items()) {
        auto& entry = dict[static_cast<std::size_t>(qwalk::CubeCode::parse(code).value())];
        if (value.is_number()) {
            entry = {value.get<double>(), false};
        } else {
            entry = {value.at("quarters").get<double>(), value.value("pause", false)};
        }
        if (!(entry.quarters > 0.0)) throw ConfigError("duration for " + code + " must be positive");
    }
    return dict;
}

} // namespace

Config parse_config(const json& j)
{
    if (!j.is_object()) throw ConfigError("config root must be an object");
    Config c;
    try {
        if (j.contains("bank")) {
            for (const auto& [family, values] : j["bank"].items()) {
                const auto list = values.get<std::vector<double>>();
                if (list.size() != 8) throw ConfigError("bank." + family + " must have 8 entries");
                std::copy(list.begin(), list.end(), c.bank.families[family].begin());
            }
        }
        if (j.contains("rules")) {
            c.rules.clear();
            for (const auto& r : j["rules"]) {
                const auto triple = r.at("triple").get<std::vector<int>>();
                if (triple.size() != 3) throw ConfigError("rule triples need 3 indices");
                c.rules.push_back({r.at("key").get<std::string>(), {triple[0], triple[1], triple[2]}});
            }
            hyperdie::validate_rules(c.rules);
        }
        if (j.contains("patch")) {
            voice::VoicePatch probe = voice::default_patch();
            for (const auto& [key, value] : j["patch"].items()) {
                voice::set_parameter(probe, key, value.get<double>()); // rejects unknown keys
                c.patch_overrides[key] = value.get<double>();
            }
        }
        if (j.contains("walk")) {
            const auto& w = j["walk"];
            if (w.contains("pitch_dict")) c.pitch_dict = parse_pitch_dict(w["pitch_dict"]);
            if (w.contains("duration_dict")) c.duration_dict = parse_duration_dict(w["duration_dict"]);
            for (const auto& s : w.value("switches", json::array())) {
                qwalk::DictionarySwitch sw;
                sw.step = s.at("step").get<int>();
                if (s.contains("pitch_dict")) sw.pitch = parse_pitch_dict(s["pitch_dict"]);
                if (s.contains("duration_dict")) sw.duration = parse_duration_dict(s["duration_dict"]);
                c.switches.push_back(std::move(sw));
            }
        }
        if (j.contains("markov")) {
            markov::TransitionMatrix m;
            m.labels = j["markov"].at("labels").get<std::vector<std::string>>();
            m.rows = j["markov"].at("rows").get<std::vector<std::vector<double>>>();
            const auto report = markov::validate_matrix(m);
            if (!report.ok()) {
                const auto& v = report.violations.front();
                throw ConfigError("markov matrix row " + std::to_string(v.row) + ": " + v.reason);
            }
            c.matrix = std::move(m);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config schema error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

Config load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(j);
}

voice::VoicePatch base_patch(const Config& config)
{
    auto patch = voice::default_patch();
    for (const auto& [key, value] : config.patch_overrides) voice::set_parameter(patch, key, value);
    return patch;
}

} // namespace qmuse::config
