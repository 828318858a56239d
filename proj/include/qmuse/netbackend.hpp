#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "qmuse/qsim.hpp"

namespace qmuse::net {

inline constexpr std::uint16_t kDefaultPort = 7117;
inline constexpr std::chrono::milliseconds kDefaultTimeout{30'000};

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = kDefaultPort;

    /// "HOST:PORT", or a bare "PORT" meaning 127.0.0.1.
    static Endpoint parse(std::string_view text);
    std::string to_string() const;
};

/// QMUSE_ENDPOINT if set, else 127.0.0.1:7117.
Endpoint default_endpoint();

/// Line-oriented JSON server in front of a Backend. One thread per
/// connection; requests on a connection are answered in order.
class Server {
public:
    /// Binds and listens immediately; port 0 picks an ephemeral port.
    /// Throws TransportError if the endpoint cannot be bound.
    Server(const Endpoint& endpoint, std::shared_ptr<qsim::Backend> backend);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t port() const noexcept { return port_; }

    /// Accept loop on the calling thread; returns after stop().
    void serve();
    /// serve() on a background thread.
    void start();
    /// Closes the listener and every open connection, joins all threads.
    void stop();

    /// Answers one request line. Never throws.
    std::string handle_line(const std::string& line) const;

private:
    void handle_connection(int fd);

    std::shared_ptr<qsim::Backend> backend_;
    int listen_fd_ = -1;
    int wake_pipe_[2] = {-1, -1};
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread accept_thread_;
    std::mutex workers_mutex_;
    std::vector<std::thread> workers_;
};

/// One client connection. Not thread-safe.
class Client {
public:
    explicit Client(const Endpoint& endpoint, std::chrono::milliseconds timeout = kDefaultTimeout);
    ~Client();

    Client(const Client&) = delete;
    Client& operator=(const Client&) = delete;

    /// Sends one line and waits for one line back (newlines stripped).
    std::string round_trip(const std::string& line);

    qsim::Counts execute(const qsim::Circuit& circuit, std::uint64_t shots, std::uint64_t seed);

private:
    int fd_ = -1;
    std::string buffer_;
};

/// One-shot request over a fresh connection. Throws TransportError when the
/// server is unreachable or silent, RemoteError when it answers with an error.
qsim::Counts remote_execute(const Endpoint& endpoint, const qsim::Circuit& circuit,
                            std::uint64_t shots, std::uint64_t seed,
                            std::chrono::milliseconds timeout = kDefaultTimeout);

/// Backend that forwards every execution to a server.
class RemoteBackend final : public qsim::Backend {
public:
    explicit RemoteBackend(Endpoint endpoint, std::chrono::milliseconds timeout = kDefaultTimeout)
        : endpoint_(std::move(endpoint)), timeout_(timeout)
    {
    }

    qsim::Counts execute(const qsim::Circuit& circuit, std::uint64_t shots, std::uint64_t seed) override
    {
        return remote_execute(endpoint_, circuit, shots, seed, timeout_);
    }

    const Endpoint& endpoint() const noexcept { return endpoint_; }

private:
    Endpoint endpoint_;
    std::chrono::milliseconds timeout_;
};

} // namespace qmuse::net
