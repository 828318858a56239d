#include "qmuse/netbackend.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <cstring>

#include "qmuse/errors.hpp"
#include "qmuse/wire.hpp"

namespace qmuse::net {

namespace {

constexpr std::size_t kMaxLineBytes = 16u << 20;

std::string errno_text() { return std::strerror(errno); }

bool send_all(int fd, std::string_view data)
{
    while (!data.empty()) {
        const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

addrinfo* resolve(const Endpoint& endpoint, bool passive)
{
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    addrinfo* result = nullptr;
    const std::string port = std::to_string(endpoint.port);
    const int rc = ::getaddrinfo(endpoint.host.empty() ? nullptr : endpoint.host.c_str(),
                                 port.c_str(), &hints, &result);
    if (rc != 0) {
        throw TransportError("cannot resolve " + endpoint.to_string() + ": " + ::gai_strerror(rc));
    }
    return result;
}

int connect_with_timeout(const Endpoint& endpoint, std::chrono::milliseconds timeout)
{
    addrinfo* addrs = resolve(endpoint, false);
    std::string last_error = "no addresses";
    int fd = -1;
    for (addrinfo* ai = addrs; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_error = errno_text();
            continue;
        }
        const int flags = ::fcntl(fd, F_GETFL, 0);
        ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
        int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
        if (rc < 0 && errno == EINPROGRESS) {
            pollfd p{fd, POLLOUT, 0};
            rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
            if (rc == 0) {
                last_error = "connect timed out";
                rc = -1;
            } else if (rc > 0) {
                int err = 0;
                socklen_t len = sizeof err;
                ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
                if (err != 0) {
                    last_error = std::strerror(err);
                    rc = -1;
                } else {
                    rc = 0;
                }
            } else {
                last_error = errno_text();
            }
        } else if (rc < 0) {
            last_error = errno_text();
        }
        if (rc == 0) {
            ::fcntl(fd, F_SETFL, flags);
            break;
        }
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(addrs);
    if (fd < 0) throw TransportError("cannot connect to " + endpoint.to_string() + ": " + last_error);

    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
    return fd;
}

} // namespace

Endpoint Endpoint::parse(std::string_view text)
{
    Endpoint e;
    std::string_view port_text = text;
    if (const auto colon = text.rfind(':'); colon != std::string_view::npos) {
        e.host = std::string(text.substr(0, colon));
        port_text = text.substr(colon + 1);
        if (e.host.size() >= 2 && e.host.front() == '[' && e.host.back() == ']') {
            e.host = e.host.substr(1, e.host.size() - 2);
        }
    }
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || value > 65535 ||
        port_text.empty()) {
        throw std::invalid_argument("bad endpoint '" + std::string(text) + "', expected HOST:PORT");
    }
    e.port = static_cast<std::uint16_t>(value);
    return e;
}

std::string Endpoint::to_string() const
{
    if (host.find(':') != std::string::npos) return "[" + host + "]:" + std::to_string(port);
    return host + ":" + std::to_string(port);
}

Endpoint default_endpoint()
{
    if (const char* env = std::getenv("QMUSE_ENDPOINT"); env != nullptr && *env != '\0') {
        return Endpoint::parse(env);
    }
    return Endpoint{};
}

// ---------------------------------------------------------------- server

Server::Server(const Endpoint& endpoint, std::shared_ptr<qsim::Backend> backend)
    : backend_(std::move(backend))
{
    if (!backend_) throw std::invalid_argument("server needs a backend");
    addrinfo* addrs = resolve(endpoint, true);
    std::string last_error = "no addresses";
    for (addrinfo* ai = addrs; ai != nullptr; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_error = errno_text();
            continue;
        }
        const int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
            listen_fd_ = fd;
            break;
        }
        last_error = errno_text();
        ::close(fd);
    }
    ::freeaddrinfo(addrs);
    if (listen_fd_ < 0) {
        throw TransportError("cannot listen on " + endpoint.to_string() + ": " + last_error);
    }

    sockaddr_storage bound{};
    socklen_t len = sizeof bound;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = bound.ss_family == AF_INET6
                ? ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port)
                : ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);

    if (::pipe2(wake_pipe_, O_CLOEXEC) != 0) {
        ::close(listen_fd_);
        throw TransportError("pipe: " + errno_text());
    }
}

Server::~Server()
{
    stop();
    if (listen_fd_ >= 0) ::close(listen_fd_);
    for (int fd : wake_pipe_) {
        if (fd >= 0) ::close(fd);
    }
}

void Server::start()
{
    accept_thread_ = std::thread([this] { serve(); });
}

void Server::stop()
{
    if (!stopping_.exchange(true)) {
        const char byte = 'x';
        [[maybe_unused]] auto n = ::write(wake_pipe_[1], &byte, 1);
    }
    if (accept_thread_.joinable() && accept_thread_.get_id() != std::this_thread::get_id()) {
        accept_thread_.join();
    }
    // Refuse new connections instead of leaving them queued in the backlog.
    if (listen_fd_ >= 0 && !accept_thread_.joinable()) {
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    for (;;) {
        std::vector<std::thread> workers;
        {
            std::lock_guard lock(workers_mutex_);
            workers.swap(workers_);
        }
        if (workers.empty()) break;
        for (auto& t : workers) t.join();
    }
}

void Server::serve()
{
    while (!stopping_) {
        pollfd fds[2] = {{listen_fd_, POLLIN, 0}, {wake_pipe_[0], POLLIN, 0}};
        if (::poll(fds, 2, -1) < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (fds[1].revents != 0) break;
        if ((fds[0].revents & POLLIN) == 0) continue;
        const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) continue;
        std::lock_guard lock(workers_mutex_);
        workers_.emplace_back([this, fd] { handle_connection(fd); });
    }
}

std::string Server::handle_line(const std::string& line) const
{
    try {
        const auto request = wire::decode_request(line);
        return wire::encode_response(backend_->execute(request.circuit, request.shots, request.seed));
    } catch (const std::exception& e) {
        return wire::encode_response(wire::ErrorReply{e.what()});
    }
}

void Server::handle_connection(int fd)
{
    std::string buffer;
    char chunk[4096];
    bool open = true;
    while (open && !stopping_) {
        pollfd fds[2] = {{fd, POLLIN, 0}, {wake_pipe_[0], POLLIN, 0}};
        if (::poll(fds, 2, -1) < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (fds[1].revents != 0) break;
        const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            break;
        }
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t newline;
        while ((newline = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, newline);
            buffer.erase(0, newline + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (!send_all(fd, handle_line(line) + "\n")) {
                open = false;
                break;
            }
        }
        if (buffer.size() > kMaxLineBytes) {
            send_all(fd, wire::encode_response(wire::ErrorReply{"request line too long"}) + "\n");
            break;
        }
    }
    ::close(fd);
}

// ---------------------------------------------------------------- client

Client::Client(const Endpoint& endpoint, std::chrono::milliseconds timeout)
    : fd_(connect_with_timeout(endpoint, timeout))
{
}

Client::~Client()
{
    if (fd_ >= 0) ::close(fd_);
}

std::string Client::round_trip(const std::string& line)
{
    if (!send_all(fd_, line + "\n")) throw TransportError("send failed: " + errno_text());
    char chunk[4096];
    std::size_t newline;
    while ((newline = buffer_.find('\n')) == std::string::npos) {
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n == 0) throw TransportError("server closed the connection");
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == EAGAIN || errno == EWOULDBLOCK) throw TransportError("request timed out");
            throw TransportError("receive failed: " + errno_text());
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
        if (buffer_.size() > kMaxLineBytes) throw TransportError("response line too long");
    }
    std::string reply = buffer_.substr(0, newline);
    buffer_.erase(0, newline + 1);
    if (!reply.empty() && reply.back() == '\r') reply.pop_back();
    return reply;
}

qsim::Counts Client::execute(const qsim::Circuit& circuit, std::uint64_t shots, std::uint64_t seed)
{
    const auto reply = wire::decode_response(round_trip(wire::encode_request({circuit, shots, seed})));
    if (const auto* err = std::get_if<wire::ErrorReply>(&reply)) throw RemoteError(err->message);
    return std::get<qsim::Counts>(reply);
}

qsim::Counts remote_execute(const Endpoint& endpoint, const qsim::Circuit& circuit,
                            std::uint64_t shots, std::uint64_t seed,
                            std::chrono::milliseconds timeout)
{
    Client client(endpoint, timeout);
    return client.execute(circuit, shots, seed);
}

} // namespace qmuse::net
