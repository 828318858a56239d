#pragma once

// Newline-delimited JSON messages exchanged between client and server.
//
//   request:  {"circuit": {...}, "shots": N, "seed": K}
//   response: {"counts": {"<key>": n, ...}, "total_shots": N}
//          or {"error": "<message>"}
//
// A circuit is {"num_qubits", "initial_code", "gates": [{"kind", "theta"?,
// "target", "controls"}], "measured_qubits"}.

#include <cstdint>
#include <string>
#include <variant>

#include <json.hpp>

#include "qmuse/qsim.hpp"

namespace qmuse::wire {

nlohmann::json to_json(const qsim::Circuit& circuit);
qsim::Circuit circuit_from_json(const nlohmann::json& j);

nlohmann::json to_json(const qsim::Counts& counts);
qsim::Counts counts_from_json(const nlohmann::json& j);

struct Request {
    qsim::Circuit circuit;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
};

struct ErrorReply {
    std::string message;
};

using Response = std::variant<qsim::Counts, ErrorReply>;

/// Single line, no trailing newline.
std::string encode_request(const Request& request);
/// Throws std::invalid_argument on malformed input.
Request decode_request(const std::string& line);

std::string encode_response(const Response& response);
/// Throws TransportError if the line is not a well-formed response.
Response decode_response(const std::string& line);

} // namespace qmuse::wire
