#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qmuse/errors.hpp"
#include "qmuse/hyperdie.hpp"
#include "qmuse/markov.hpp"
#include "qmuse/netbackend.hpp"
#include "qmuse/qsim.hpp"
#include "qmuse/qwalk.hpp"
#include "qmuse/score.hpp"
#include "qmuse/spectrum.hpp"
#include "qmuse/voice.hpp"

namespace py = pybind11;
using namespace qmuse;

namespace {

using BackendPtr = std::shared_ptr<qsim::Backend>;

qsim::Backend& backend_or_local(const BackendPtr& backend)
{
    static qsim::LocalBackend local;
    return backend ? *backend : local;
}

py::dict counts_dict(const qsim::Counts& counts)
{
    py::dict d;
    for (const auto& [key, n] : counts.histogram) d[py::str(key)] = n;
    return d;
}

std::chrono::milliseconds to_ms(double seconds)
{
    if (!(seconds > 0.0)) throw std::invalid_argument("timeout must be positive");
    return std::chrono::milliseconds(static_cast<std::int64_t>(seconds * 1000.0 + 0.5));
}

voice::AudioBuffer to_buffer(py::array_t<double, py::array::c_style | py::array::forcecast> samples,
                             int sample_rate)
{
    if (samples.ndim() != 1) throw std::invalid_argument("samples must be one-dimensional");
    voice::AudioBuffer buf;
    buf.sample_rate = sample_rate;
    buf.samples.assign(samples.data(), samples.data() + samples.size());
    return buf;
}

py::array_t<double> to_array(const std::vector<double>& v)
{
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::bytes to_bytes(const std::vector<std::uint8_t>& v)
{
    return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

hyperdie::ParameterBank merged_bank(const std::map<std::string, std::array<double, 8>>& extra)
{
    auto bank = hyperdie::default_bank();
    for (const auto& [family, values] : extra) bank.families[family] = values;
    return bank;
}

std::vector<hyperdie::CodeRule> rules_from(const std::vector<std::pair<std::string, std::array<int, 3>>>& rules)
{
    std::vector<hyperdie::CodeRule> out;
    for (const auto& [key, triple] : rules) out.push_back({key, triple});
    hyperdie::validate_rules(out);
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Quantum-circuit driven voice synthesis and melody generation";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<DegenerateStateError>(m, "DegenerateStateError");
    py::register_exception<TransportError>(m, "TransportError", PyExc_ConnectionError);
    py::register_exception<RemoteError>(m, "RemoteError");
    py::register_exception<FileError>(m, "FileError", PyExc_OSError);

    // ------------------------------------------------------------ circuits

    py::enum_<qsim::GateKind>(m, "GateKind")
        .value("X", qsim::GateKind::X)
        .value("H", qsim::GateKind::H)
        .value("RX", qsim::GateKind::RX)
        .value("RY", qsim::GateKind::RY)
        .value("RZ", qsim::GateKind::RZ)
        .value("CX", qsim::GateKind::CX)
        .value("CCX", qsim::GateKind::CCX);

    py::class_<qsim::Gate>(m, "Gate")
        .def_readwrite("kind", &qsim::Gate::kind)
        .def_readwrite("theta", &qsim::Gate::theta)
        .def_readwrite("target", &qsim::Gate::target)
        .def_readwrite("controls", &qsim::Gate::controls)
        .def_static("x", &qsim::Gate::x, py::arg("target"))
        .def_static("h", &qsim::Gate::h, py::arg("target"))
        .def_static("rx", &qsim::Gate::rx, py::arg("theta"), py::arg("target"))
        .def_static("ry", &qsim::Gate::ry, py::arg("theta"), py::arg("target"))
        .def_static("rz", &qsim::Gate::rz, py::arg("theta"), py::arg("target"))
        .def_static("cx", &qsim::Gate::cx, py::arg("control"), py::arg("target"))
        .def_static("ccx", &qsim::Gate::ccx, py::arg("control_a"), py::arg("control_b"), py::arg("target"))
        .def(py::self == py::self)
        .def("__repr__", [](const qsim::Gate& g) {
            return "Gate(" + std::string(qsim::to_string(g.kind)) + ", target=" + std::to_string(g.target) + ")";
        });

    py::class_<qsim::Circuit>(m, "Circuit")
        .def(py::init([](int num_qubits, std::vector<qsim::Gate> gates, std::vector<int> measured,
                         std::string initial_code) {
                 qsim::Circuit c;
                 c.num_qubits = num_qubits;
                 c.gates = std::move(gates);
                 c.measured_qubits = std::move(measured);
                 c.initial_code = std::move(initial_code);
                 return c;
             }),
             py::arg("num_qubits"), py::arg("gates") = std::vector<qsim::Gate>{},
             py::arg("measured_qubits") = std::vector<int>{}, py::arg("initial_code") = "")
        .def_readwrite("num_qubits", &qsim::Circuit::num_qubits)
        .def_readwrite("initial_code", &qsim::Circuit::initial_code)
        .def_readwrite("gates", &qsim::Circuit::gates)
        .def_readwrite("measured_qubits", &qsim::Circuit::measured_qubits)
        .def("validate", [](const qsim::Circuit& c) { qsim::validate_circuit(c); })
        .def(py::self == py::self);

    m.def("simulate", [](const qsim::Circuit& c) {
        const auto state = qsim::simulate(c);
        return std::vector<qsim::Amplitude>(state.amplitudes().begin(), state.amplitudes().end());
    }, py::arg("circuit"), "Final state vector; index bit i is qubit i");
    m.def("measurement_distribution", &qsim::measurement_distribution, py::arg("circuit"));
    m.def("run_circuit", [](const qsim::Circuit& c, std::uint64_t shots, std::uint64_t seed) {
        return counts_dict(qsim::run_circuit(c, shots, seed));
    }, py::arg("circuit"), py::arg("shots"), py::arg("seed") = 0,
       "Shot histogram keyed by bitstring, measured_qubits[0] rightmost");

    // ------------------------------------------------------------ backends

    py::class_<qsim::Backend, BackendPtr>(m, "Backend")
        .def("execute", [](qsim::Backend& b, const qsim::Circuit& c, std::uint64_t shots, std::uint64_t seed) {
            qsim::Counts counts;
            {
                py::gil_scoped_release release;
                counts = b.execute(c, shots, seed);
            }
            return counts_dict(counts);
        }, py::arg("circuit"), py::arg("shots"), py::arg("seed") = 0);

    py::class_<qsim::LocalBackend, qsim::Backend, std::shared_ptr<qsim::LocalBackend>>(m, "LocalBackend")
        .def(py::init<>());

    py::class_<net::RemoteBackend, qsim::Backend, std::shared_ptr<net::RemoteBackend>>(m, "RemoteBackend")
        .def(py::init([](const std::string& endpoint, double timeout) {
                 return std::make_shared<net::RemoteBackend>(
                     endpoint.empty() ? net::default_endpoint() : net::Endpoint::parse(endpoint), to_ms(timeout));
             }),
             py::arg("endpoint") = "", py::arg("timeout") = 30.0,
             "HOST:PORT; empty means QMUSE_ENDPOINT or 127.0.0.1:7117")
        .def_property_readonly("endpoint", [](const net::RemoteBackend& b) { return b.endpoint().to_string(); });

    py::class_<net::Server>(m, "Server")
        .def(py::init([](const std::string& host, std::uint16_t port, BackendPtr backend) {
                 if (!backend) backend = std::make_shared<qsim::LocalBackend>();
                 return std::make_unique<net::Server>(net::Endpoint{host, port}, std::move(backend));
             }),
             py::arg("host") = "127.0.0.1", py::arg("port") = 0, py::arg("backend") = nullptr)
        .def_property_readonly("port", &net::Server::port)
        .def("start", &net::Server::start)
        .def("stop", &net::Server::stop, py::call_guard<py::gil_scoped_release>())
        .def("__enter__", [](net::Server& s) -> net::Server& { s.start(); return s; },
             py::return_value_policy::reference)
        .def("__exit__", [](net::Server& s, py::args) {
            py::gil_scoped_release release;
            s.stop();
        });

    // ------------------------------------------------------------ voice

    py::class_<voice::VoicePatch>(m, "VoicePatch")
        .def(py::init([] { return voice::default_patch(); }))
        .def("__getitem__", [](const voice::VoicePatch& p, const std::string& k) { return voice::get_parameter(p, k); })
        .def("__setitem__", [](voice::VoicePatch& p, const std::string& k, double v) { voice::set_parameter(p, k, v); })
        .def_static("keys", &voice::parameter_names)
        .def("to_dict", [](const voice::VoicePatch& p) {
            py::dict d;
            for (const auto& k : voice::parameter_names()) d[py::str(k)] = voice::get_parameter(p, k);
            return d;
        })
        .def("validate", [](const voice::VoicePatch& p) { voice::validate_patch(p); });

    m.def("render_voice", [](const voice::VoicePatch& patch, int sample_rate) {
        voice::AudioBuffer buf;
        {
            py::gil_scoped_release release;
            buf = voice::render_voice(patch, {sample_rate});
        }
        return to_array(buf.samples);
    }, py::arg("patch"), py::arg("sample_rate") = 44100);

    m.def("spectral_peaks", [](py::array_t<double, py::array::c_style | py::array::forcecast> samples,
                               int sample_rate, double at_time, double window, double frame,
                               double max_bin_hz, double floor_db) {
        const auto peaks = voice::spectral_peaks(to_buffer(samples, sample_rate), at_time, window,
                                                 {frame, max_bin_hz, floor_db});
        std::vector<std::pair<double, double>> out;
        for (const auto& p : peaks) out.emplace_back(p.frequency, p.magnitude_db);
        return out;
    }, py::arg("samples"), py::arg("sample_rate"), py::arg("at_time"), py::arg("window"),
       py::arg("frame") = 0.0, py::arg("max_bin_hz") = 20.0, py::arg("floor_db") = 80.0,
       "(frequency, dB) pairs, strongest first");

    m.def("wav_bytes", [](py::array_t<double, py::array::c_style | py::array::forcecast> samples, int sample_rate) {
        const auto bytes = voice::wav_bytes(to_buffer(samples, sample_rate));
        return to_bytes(bytes);
    }, py::arg("samples"), py::arg("sample_rate"));
    m.def("write_wav", [](py::array_t<double, py::array::c_style | py::array::forcecast> samples, int sample_rate,
                          const std::filesystem::path& path) { voice::write_wav(to_buffer(samples, sample_rate), path); },
          py::arg("samples"), py::arg("sample_rate"), py::arg("path"));

    // ------------------------------------------------------------ hyperdie

    m.def("die_circuit", &hyperdie::die_circuit, py::arg("with_hadamards") = true);
    m.def("roll_die", [](std::uint64_t seed, BackendPtr backend) {
        qsim::Backend& b = backend_or_local(backend);
        py::gil_scoped_release release;
        return hyperdie::roll_die(b, seed).to_string();
    }, py::arg("seed"), py::arg("backend") = nullptr, "One roll as \"C8...C0\"");
    m.def("default_bank", [] { return hyperdie::default_bank().families; });
    m.def("default_rules", [] {
        std::vector<std::pair<std::string, std::array<int, 3>>> out;
        for (const auto& r : hyperdie::default_rules()) out.emplace_back(r.key, r.triple);
        return out;
    });
    m.def("assemble_code", [](const std::string& bits, std::array<int, 3> triple) {
        return hyperdie::assemble_code(hyperdie::DieMeasurement::from_string(bits), triple);
    }, py::arg("bits"), py::arg("triple"));
    m.def("retrieve_patch",
          [](const std::string& bits, const std::map<std::string, std::array<double, 8>>& bank,
             const std::optional<std::vector<std::pair<std::string, std::array<int, 3>>>>& rules,
             const std::optional<voice::VoicePatch>& base) {
              return hyperdie::retrieve_patch(hyperdie::DieMeasurement::from_string(bits), merged_bank(bank),
                                              rules ? rules_from(*rules) : hyperdie::default_rules(),
                                              base ? *base : voice::default_patch());
          },
          py::arg("bits"), py::arg("bank") = std::map<std::string, std::array<double, 8>>{},
          py::arg("rules") = py::none(), py::arg("base") = py::none(),
          "Patch selected by a roll; `bank` families are merged over the defaults");

    // ------------------------------------------------------------ score

    py::class_<score::NoteEvent>(m, "NoteEvent")
        .def(py::init<std::optional<int>, double, int>(), py::arg("pitch"), py::arg("duration") = 1.0,
             py::arg("velocity") = 96)
        .def_readwrite("pitch", &score::NoteEvent::pitch)
        .def_readwrite("duration", &score::NoteEvent::duration)
        .def_readwrite("velocity", &score::NoteEvent::velocity)
        .def_property_readonly("is_rest", &score::NoteEvent::is_rest)
        .def(py::self == py::self)
        .def("__repr__", [](const score::NoteEvent& e) {
            return "NoteEvent(" + (e.pitch ? score::note_name(*e.pitch) : std::string("rest")) + ", " +
                   std::to_string(e.duration) + ")";
        });

    py::class_<score::Sequence>(m, "Sequence")
        .def(py::init([](std::vector<score::NoteEvent> events, double tempo) {
                 return score::Sequence{std::move(events), tempo};
             }),
             py::arg("events") = std::vector<score::NoteEvent>{}, py::arg("tempo_bpm") = 120.0)
        .def_readwrite("events", &score::Sequence::events)
        .def_readwrite("tempo_bpm", &score::Sequence::tempo_bpm);

    m.def("to_midi_bytes", [](const score::Sequence& s, int tpq) { return to_bytes(score::to_midi_bytes(s, tpq)); },
          py::arg("sequence"), py::arg("ticks_per_quarter") = score::kDefaultTicksPerQuarter);
    m.def("write_midi", &score::write_midi, py::arg("sequence"), py::arg("path"),
          py::arg("ticks_per_quarter") = score::kDefaultTicksPerQuarter);
    m.def("note_number", &score::note_number, py::arg("name"));
    m.def("note_name", &score::note_name, py::arg("midi"));

    // ------------------------------------------------------------ quantum walk

    m.def("apply_die", [](const std::string& code, int d3, int d4) {
        return qwalk::apply_die(qwalk::CubeCode::parse(code), {d3, d4}).to_string();
    }, py::arg("code"), py::arg("d3"), py::arg("d4"));
    m.def("build_walk_circuit", [](const std::string& code, std::optional<std::pair<int, int>> forced) {
        std::optional<qwalk::DieOutcome> die;
        if (forced) die = qwalk::DieOutcome{forced->first, forced->second};
        return qwalk::build_walk_circuit(qwalk::CubeCode::parse(code), die);
    }, py::arg("code"), py::arg("forced") = py::none());
    m.def("walk_step", [](const std::string& code, std::uint64_t shots, std::uint64_t seed, BackendPtr backend) {
        qsim::Backend& b = backend_or_local(backend);
        py::gil_scoped_release release;
        return qwalk::walk_step(b, qwalk::CubeCode::parse(code), shots, seed).to_string();
    }, py::arg("code"), py::arg("shots") = 500, py::arg("seed") = 0, py::arg("backend") = nullptr);

    py::class_<qwalk::Walk>(m, "Walk")
        .def_readonly("sequence", &qwalk::Walk::sequence)
        .def_property_readonly("pitch_codes", [](const qwalk::Walk& w) {
            std::vector<std::string> out;
            for (const auto& c : w.pitch_codes) out.push_back(c.to_string());
            return out;
        })
        .def_property_readonly("duration_codes", [](const qwalk::Walk& w) {
            std::vector<std::string> out;
            for (const auto& c : w.duration_codes) out.push_back(c.to_string());
            return out;
        });

    m.def("generate_walk",
          [](int steps, std::uint64_t shots, const std::string& pitch, const std::string& duration,
             std::uint64_t seed, int base, double tempo, BackendPtr backend) {
              qwalk::WalkConfig cfg;
              cfg.steps = steps;
              cfg.shots = shots;
              cfg.initial_pitch = qwalk::CubeCode::parse(pitch);
              cfg.initial_duration = qwalk::CubeCode::parse(duration);
              cfg.seed = seed;
              cfg.pitch_dict = qwalk::default_pitch_dictionary(base);
              cfg.tempo_bpm = tempo;
              qsim::Backend& b = backend_or_local(backend);
              py::gil_scoped_release release;
              return qwalk::generate_sequence(cfg, b);
          },
          py::arg("steps") = 24, py::arg("shots") = 500, py::arg("initial_pitch") = "000",
          py::arg("initial_duration") = "100", py::arg("seed") = 0, py::arg("base_note") = 60,
          py::arg("tempo_bpm") = 120.0, py::arg("backend") = nullptr);

    // ------------------------------------------------------------ markov

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed") = 0)
        .def("uniform", &Rng::uniform);

    py::class_<markov::TransitionMatrix>(m, "TransitionMatrix")
        .def(py::init([](std::vector<std::string> labels, std::vector<std::vector<double>> rows) {
                 return markov::TransitionMatrix{std::move(labels), std::move(rows)};
             }),
             py::arg("labels"), py::arg("rows"))
        .def_readwrite("labels", &markov::TransitionMatrix::labels)
        .def_readwrite("rows", &markov::TransitionMatrix::rows)
        .def("validate", [](const markov::TransitionMatrix& mat) {
            std::vector<std::pair<std::size_t, std::string>> out;
            for (const auto& v : markov::validate_matrix(mat).violations) out.emplace_back(v.row, v.reason);
            return out;
        }, "(row, reason) for every violation; empty when valid");

    m.def("rules_chain", &markov::rules_chain);
    m.def("random_walk_chain", &markov::random_walk_chain);
    m.def("next_note", &markov::next_note, py::arg("matrix"), py::arg("current"), py::arg("rng"));
    m.def("generate_melody", &markov::generate, py::arg("matrix"), py::arg("start"), py::arg("length"),
          py::arg("rng"));
}
