#include "qmuse/wire.hpp"

#include <stdexcept>

#include "qmuse/errors.hpp"

namespace qmuse::wire {

using nlohmann::json;

json to_json(const qsim::Circuit& circuit)
{
    json gates = json::array();
    for (const auto& g : circuit.gates) {
        json jg = {{"kind", qsim::to_string(g.kind)}, {"target", g.target}, {"controls", g.controls}};
        if (g.kind == qsim::GateKind::RX || g.kind == qsim::GateKind::RY ||
            g.kind == qsim::GateKind::RZ) {
            jg["theta"] = g.theta;
        }
        gates.push_back(std::move(jg));
    }
    return {{"num_qubits", circuit.num_qubits},
            {"initial_code", circuit.initial_code},
            {"gates", std::move(gates)},
            {"measured_qubits", circuit.measured_qubits}};
}

qsim::Circuit circuit_from_json(const json& j)
{
    try {
        qsim::Circuit c;
        c.num_qubits = j.at("num_qubits").get<int>();
        c.initial_code = j.value("initial_code", std::string{});
        for (const auto& jg : j.at("gates")) {
            qsim::Gate g;
            g.kind = qsim::gate_kind_from_string(jg.at("kind").get<std::string>());
            g.theta = jg.value("theta", 0.0);
            g.target = jg.at("target").get<int>();
            g.controls = jg.value("controls", std::vector<int>{});
            c.gates.push_back(std::move(g));
        }
        c.measured_qubits = j.at("measured_qubits").get<std::vector<int>>();
        return c;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed circuit: ") + e.what());
    }
}

json to_json(const qsim::Counts& counts)
{
    json hist = json::object();
    for (const auto& [key, n] : counts.histogram) hist[key] = n;
    return hist;
}

qsim::Counts counts_from_json(const json& j)
{
    qsim::Counts counts;
    for (const auto& [key, n] : j.items()) {
        const auto v = n.get<std::uint64_t>();
        counts.histogram.emplace(key, v);
        counts.total_shots += v;
    }
    return counts;
}

std::string encode_request(const Request& request)
{
    json j = {{"circuit", to_json(request.circuit)}, {"shots", request.shots}, {"seed", request.seed}};
    return j.dump();
}

Request decode_request(const std::string& line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error&) {
        throw std::invalid_argument("malformed request: not valid JSON");
    }
    if (!j.is_object()) throw std::invalid_argument("malformed request: expected an object");
    Request r;
    r.circuit = circuit_from_json(j.contains("circuit") ? j["circuit"] : json::object());
    const auto& shots = j.contains("shots") ? j["shots"] : json();
    if (!shots.is_number_unsigned()) throw std::invalid_argument("invalid shots");
    r.shots = shots.get<std::uint64_t>();
    if (r.shots == 0) throw std::invalid_argument("invalid shots");
    const auto& seed = j.contains("seed") ? j["seed"] : json(0);
    if (!seed.is_number_unsigned()) throw std::invalid_argument("invalid seed");
    r.seed = seed.get<std::uint64_t>();
    return r;
}

std::string encode_response(const Response& response)
{
    json j;
    if (const auto* counts = std::get_if<qsim::Counts>(&response)) {
        j = {{"counts", to_json(*counts)}, {"total_shots", counts->total_shots}};
    } else {
        j = {{"error", std::get<ErrorReply>(response).message}};
    }
    return j.dump();
}

Response decode_response(const std::string& line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error&) {
        throw TransportError("malformed response from server");
    }
    if (j.is_object() && j.contains("error") && !j.contains("counts")) {
        return ErrorReply{j["error"].get<std::string>()};
    }
    if (!j.is_object() || !j.contains("counts") || j.contains("error")) {
        throw TransportError("response must carry exactly one of counts/error");
    }
    try {
        auto counts = counts_from_json(j["counts"]);
        if (j.contains("total_shots") && j["total_shots"].get<std::uint64_t>() != counts.total_shots) {
            throw TransportError("response total_shots does not match counts");
        }
        return counts;
    } catch (const json::exception&) {
        throw TransportError("malformed counts in response");
    }
}

} // namespace qmuse::wire
