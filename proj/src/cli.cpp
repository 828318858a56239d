#include "qmuse/cli.hpp"

#include <csignal>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qmuse/config.hpp"
#include "qmuse/errors.hpp"
#include "qmuse/hyperdie.hpp"
#include "qmuse/markov.hpp"
#include "qmuse/netbackend.hpp"
#include "qmuse/qwalk.hpp"
#include "qmuse/rng.hpp"
#include "qmuse/score.hpp"
#include "qmuse/voice.hpp"

namespace qmuse::cli {

namespace {

struct Options {
    std::string backend = "local";
    std::string config_path;
    std::uint64_t seed = 0;

    // die / voice
    int sounds = 1;
    bool concat = false;
    int sample_rate = 44100;

    // walk
    int steps = 24;
    std::uint64_t shots = 500;
    std::string pitch = "000";
    std::string duration = "100";

    // markov
    std::string matrix = "rules";
    std::string start = "C4";
    int length = 16;
    double note_quarters = 1.0;
    bool interactive = false;

    // midi
    int tpq = score::kDefaultTicksPerQuarter;
    double tempo = 120.0;

    // serve
    std::string listen = "127.0.0.1:7117";

    std::string out;
};

config::Config load(const Options& o)
{
    return o.config_path.empty() ? config::Config{} : config::load_config(o.config_path);
}

std::string format_value(double v)
{
    std::ostringstream s;
    s << v;
    return s.str();
}

int cmd_die(const Options& o, std::ostream& out)
{
    const auto cfg = load(o);
    auto backend = make_backend(o.backend);
    const auto roll = hyperdie::roll_die(*backend, o.seed);
    const auto patch = hyperdie::retrieve_patch(roll, cfg.bank, cfg.rules, config::base_patch(cfg));

    out << "measurement [C8..C0]: " << roll.to_string() << "\n";
    out << "code        binary  decimal  parameter  value\n";
    for (const auto& rule : cfg.rules) {
        const int code = hyperdie::assemble_code(roll, rule.triple);
        std::string bits;
        std::string label = "(";
        for (std::size_t k = 0; k < 3; ++k) {
            bits.push_back(roll.c(rule.triple[k]) ? '1' : '0');
            label += "C" + std::to_string(rule.triple[k]) + (k < 2 ? " " : ")");
        }
        out << std::left << std::setw(12) << label << std::setw(8) << bits << std::setw(9) << code
            << std::setw(11) << rule.key << format_value(voice::get_parameter(patch, rule.key)) << "\n";
    }
    return 0;
}

std::filesystem::path numbered(const std::filesystem::path& base, int index)
{
    auto name = base.stem().string() + "_" + std::to_string(index) + base.extension().string();
    return base.parent_path() / name;
}

int cmd_voice(const Options& o, std::ostream& out)
{
    if (o.sounds < 1) throw std::invalid_argument("--sounds must be at least 1");
    const auto cfg = load(o);
    auto backend = make_backend(o.backend);
    const auto base = config::base_patch(cfg);
    const std::filesystem::path target = o.out.empty() ? "voice.wav" : o.out;

    std::vector<voice::AudioBuffer> rendered;
    for (int i = 0; i < o.sounds; ++i) {
        const auto roll = hyperdie::roll_die(*backend, derive_seed(o.seed, static_cast<std::uint64_t>(i)));
        const auto patch = hyperdie::retrieve_patch(roll, cfg.bank, cfg.rules, base);
        auto buffer = voice::render_voice(patch, {o.sample_rate});
        out << "sound " << i + 1 << ": roll " << roll.to_string() << ", fnd " << patch.fnd_start
            << "->" << patch.fnd_end << " Hz, dur " << patch.dur << " s";
        if (!o.concat) {
            const auto path = o.sounds == 1 ? target : numbered(target, i + 1);
            voice::write_wav(buffer, path);
            out << " -> " << path.string();
        }
        out << "\n";
        rendered.push_back(std::move(buffer));
    }
    if (o.concat) {
        voice::write_wav(voice::concatenate(rendered), target);
        out << "wrote " << target.string() << "\n";
    }
    return 0;
}

int cmd_walk(const Options& o, std::ostream& out)
{
    const auto cfg = load(o);
    auto backend = make_backend(o.backend);
    qwalk::WalkConfig wc;
    wc.steps = o.steps;
    wc.shots = o.shots;
    wc.initial_pitch = qwalk::CubeCode::parse(o.pitch);
    wc.initial_duration = qwalk::CubeCode::parse(o.duration);
    wc.seed = o.seed;
    wc.tempo_bpm = o.tempo;
    if (cfg.pitch_dict) wc.pitch_dict = *cfg.pitch_dict;
    if (cfg.duration_dict) wc.duration_dict = *cfg.duration_dict;
    wc.switches = cfg.switches;

    const auto walk = qwalk::generate_sequence(wc, *backend);
    out << "step  pitch  duration  event\n";
    for (std::size_t i = 0; i < walk.sequence.events.size(); ++i) {
        const auto& e = walk.sequence.events[i];
        out << std::left << std::setw(6) << i + 1 << std::setw(7) << walk.pitch_codes[i].to_string()
            << std::setw(10) << walk.duration_codes[i].to_string()
            << (e.is_rest() ? std::string("rest") : score::note_name(*e.pitch)) << " " << e.duration << "\n";
    }
    const std::filesystem::path target = o.out.empty() ? "walk.mid" : o.out;
    score::write_midi(walk.sequence, target, o.tpq);
    out << "wrote " << target.string() << "\n";
    return 0;
}

markov::TransitionMatrix pick_matrix(const Options& o, const config::Config& cfg)
{
    if (o.matrix == "rules") return markov::rules_chain();
    if (o.matrix == "walk") return markov::random_walk_chain();
    if (o.matrix == "config") {
        if (!cfg.matrix) throw ConfigError("--matrix config needs a markov section in --config");
        return *cfg.matrix;
    }
    throw std::invalid_argument("unknown matrix '" + o.matrix + "'");
}

int cmd_markov(const Options& o, std::istream& in, std::ostream& out, std::ostream& err)
{
    const auto cfg = load(o);
    const auto matrix = pick_matrix(o, cfg);
    Rng rng(o.seed);

    if (o.interactive) {
        std::string line;
        while (std::getline(in, line)) {
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            const auto last = line.find_last_not_of(" \t\r");
            const std::string label = line.substr(first, last - first + 1);
            if (label == "quit" || label == "exit") break;
            try {
                out << markov::next_note(matrix, label, rng) << std::endl;
            } catch (const std::exception& e) {
                err << "error: " << e.what() << std::endl;
            }
        }
        return 0;
    }

    const auto notes = markov::generate(matrix, o.start, o.length, rng);
    score::Sequence seq;
    seq.tempo_bpm = o.tempo;
    for (const auto& n : notes) seq.events.push_back(score::NoteEvent::note(score::note_number(n), o.note_quarters));
    for (std::size_t i = 0; i < notes.size(); ++i) out << (i ? " " : "") << notes[i];
    out << "\n";
    const std::filesystem::path target = o.out.empty() ? "markov.mid" : o.out;
    score::write_midi(seq, target, o.tpq);
    out << "wrote " << target.string() << "\n";
    return 0;
}

int cmd_serve(const Options& o, std::ostream& out)
{
    // Block termination signals before any thread exists so sigwait() sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    net::Server server(net::Endpoint::parse(o.listen), std::make_shared<qsim::LocalBackend>());
    server.start();
    out << "listening on " << net::Endpoint::parse(o.listen).host << ":" << server.port() << std::endl;
    int received = 0;
    sigwait(&signals, &received);
    server.stop();
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    return 0;
}

} // namespace

std::shared_ptr<qsim::Backend> make_backend(const std::string& spec)
{
    if (spec == "local") return std::make_shared<qsim::LocalBackend>();
    if (spec == "remote") return std::make_shared<net::RemoteBackend>(net::default_endpoint());
    if (spec.starts_with("remote:")) {
        return std::make_shared<net::RemoteBackend>(net::Endpoint::parse(spec.substr(7)));
    }
    throw std::invalid_argument("unknown backend '" + spec + "', expected local or remote[:HOST:PORT]");
}

std::string gate_tables()
{
    std::ostringstream s;
    auto row = [&](const std::string& input, const qsim::Gate& gate) {
        const auto state = qsim::apply_gate(qsim::prepare_basis(static_cast<int>(input.size()), input), gate);
        std::size_t index = 0;
        for (std::size_t i = 0; i < state.dimension(); ++i) {
            if (std::norm(state[i]) > 0.5) index = i;
        }
        s << "|" << input << ">  |" << qsim::to_bitstring(index, static_cast<int>(input.size())) << ">\n";
    };
    s << "CX gate table (control q1, target q0)\n";
    s << "Input  Result\n";
    for (const char* in : {"00", "01", "10", "11"}) row(in, qsim::Gate::cx(1, 0));
    s << "\nToffoli gate table (controls q2 q1, target q0)\n";
    s << "Input   Result\n";
    for (const char* in : {"000", "001", "010", "011", "100", "101", "110", "111"}) {
        row(in, qsim::Gate::ccx(2, 1, 0));
    }
    return s.str();
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Quantum and classical music generators", "qmuse"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--backend", o.backend, "local, remote or remote:HOST:PORT")->capture_default_str();
    app.add_option("--config", o.config_path, "JSON config file");

    auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", o.seed, "RNG seed")->capture_default_str(); };

    auto* die = app.add_subcommand("die", "Roll the 9-qubit hyper-die and decode synthesis parameters");
    add_seed(die);

    auto* voice_cmd = app.add_subcommand("voice", "Render die-driven FOF voices to WAV");
    add_seed(voice_cmd);
    voice_cmd->add_option("--sounds", o.sounds, "Number of sounds")->check(CLI::PositiveNumber);
    voice_cmd->add_flag("--concat", o.concat, "Write one concatenated file");
    voice_cmd->add_option("--sample-rate", o.sample_rate)->check(CLI::Range(8000, 192000));
    voice_cmd->add_option("--out", o.out, "Output WAV path");

    auto* walk = app.add_subcommand("walk", "Quantum-walk note sequencer to MIDI");
    add_seed(walk);
    walk->add_option("--steps", o.steps)->check(CLI::PositiveNumber);
    walk->add_option("--shots", o.shots)->check(CLI::PositiveNumber);
    walk->add_option("--pitch", o.pitch, "Initial pitch code (q0q1q2)");
    walk->add_option("--duration", o.duration, "Initial duration code (q0q1q2)");
    walk->add_option("--out", o.out, "Output MIDI path");
    walk->add_option("--tpq", o.tpq)->check(CLI::Range(1, 32767));
    walk->add_option("--tempo", o.tempo)->check(CLI::PositiveNumber);

    auto* mk = app.add_subcommand("markov", "Markov-chain melody generator");
    add_seed(mk);
    mk->add_option("--matrix", o.matrix, "rules, walk or config")->capture_default_str();
    mk->add_option("--start", o.start);
    mk->add_option("--length", o.length)->check(CLI::PositiveNumber);
    mk->add_option("--note-length", o.note_quarters, "Quarter notes per event")->check(CLI::PositiveNumber);
    mk->add_flag("--interactive", o.interactive, "Answer one note per input line");
    mk->add_option("--out", o.out, "Output MIDI path");
    mk->add_option("--tpq", o.tpq)->check(CLI::Range(1, 32767));
    mk->add_option("--tempo", o.tempo)->check(CLI::PositiveNumber);

    auto* serve = app.add_subcommand("serve", "Serve circuits over TCP");
    serve->add_option("--listen", o.listen, "HOST:PORT")->capture_default_str();

    auto* gates = app.add_subcommand("gates", "Print the CX and Toffoli truth tables");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return 2;
    }

    try {
        if (die->parsed()) return cmd_die(o, out);
        if (voice_cmd->parsed()) return cmd_voice(o, out);
        if (walk->parsed()) return cmd_walk(o, out);
        if (mk->parsed()) return cmd_markov(o, in, out, err);
        if (serve->parsed()) return cmd_serve(o, out);
        if (gates->parsed()) {
            out << gate_tables();
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace qmuse::cli
