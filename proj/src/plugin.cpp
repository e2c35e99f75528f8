#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "noisyspell/langmodel.hpp"

namespace noisyspell {

PluginEndpoint PluginEndpoint::parse(std::string_view spec) {
    PluginEndpoint e;
    if (spec.rfind("stdio:", 0) == 0) {
        e.transport = Transport::Subprocess;
        e.command = std::string(spec.substr(6));
        if (e.command.empty()) {
            throw std::invalid_argument("plugin endpoint 'stdio:' needs a command");
        }
        return e;
    }
    if (spec.rfind("tcp:", 0) == 0) {
        auto rest = spec.substr(4);
        auto colon = rest.rfind(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 == rest.size()) {
            throw std::invalid_argument("plugin endpoint must look like tcp:<host>:<port>");
        }
        e.transport = Transport::Tcp;
        e.host = std::string(rest.substr(0, colon));
        try {
            e.port = std::stoi(std::string(rest.substr(colon + 1)));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad plugin port in " + std::string(spec));
        }
        return e;
    }
    throw std::invalid_argument("unknown plugin endpoint '" + std::string(spec) + "' (use stdio:<cmd> or tcp:<host>:<port>)");
}

std::string PluginEndpoint::to_string() const {
    return transport == Transport::Subprocess ? "stdio:" + command : "tcp:" + host + ":" + std::to_string(port);
}

nlohmann::json make_plugin_request(std::uint64_t id, const LMQuery& query) {
    return {{"v", 1}, {"id", id}, {"left", query.left}, {"right", query.right}, {"candidates", query.candidates}};
}

std::vector<LogProb> parse_plugin_response(const std::string& line, std::uint64_t expected_id,
                                           std::size_t expected_count) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw PriorError(std::string("malformed plugin response: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.at("id").is_number_unsigned()) {
        throw PriorError("plugin response has no numeric id");
    }
    if (j.at("id").get<std::uint64_t>() != expected_id) {
        throw PriorError("plugin response id " + std::to_string(j.at("id").get<std::uint64_t>()) +
                         " does not match request " + std::to_string(expected_id));
    }
    if (j.contains("error")) {
        throw PriorError("plugin backend error: " + j.at("error").dump());
    }
    if (!j.contains("logprobs") || !j.at("logprobs").is_array()) {
        throw PriorError("plugin response has no logprobs array");
    }
    const auto& arr = j.at("logprobs");
    if (arr.size() != expected_count) {
        throw PriorError("plugin returned " + std::to_string(arr.size()) + " scores for " +
                         std::to_string(expected_count) + " candidates");
    }
    std::vector<LogProb> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) {
            throw PriorError("plugin score is not a number");
        }
        double lp = v.get<double>();
        if (!std::isfinite(lp)) {
            throw PriorError("plugin returned a non-finite score");
        }
        // Allow float round-off around log(1).
        if (lp > 1e-6) {
            throw PriorError("plugin returned a positive log-probability");
        }
        out.push_back(std::min(lp, 0.0));
    }
    return out;
}

PluginClient::PluginClient(PluginEndpoint endpoint) : endpoint_(std::move(endpoint)) {
    std::signal(SIGPIPE, SIG_IGN);
    if (endpoint_.transport == PluginEndpoint::Transport::Subprocess) {
        int to_child[2];
        int from_child[2];
        if (::pipe(to_child) != 0) {
            throw PriorError(std::string("pipe failed: ") + std::strerror(errno));
        }
        if (::pipe(from_child) != 0) {
            ::close(to_child[0]);
            ::close(to_child[1]);
            throw PriorError(std::string("pipe failed: ") + std::strerror(errno));
        }
        const pid_t pid = ::fork();
        if (pid < 0) {
            throw PriorError(std::string("fork failed: ") + std::strerror(errno));
        }
        if (pid == 0) {
            ::dup2(to_child[0], STDIN_FILENO);
            ::dup2(from_child[1], STDOUT_FILENO);
            ::close(to_child[0]);
            ::close(to_child[1]);
            ::close(from_child[0]);
            ::close(from_child[1]);
            ::execl("/bin/sh", "sh", "-c", endpoint_.command.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(to_child[0]);
        ::close(from_child[1]);
        ::fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
        ::fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
        write_fd_ = to_child[1];
        read_fd_ = from_child[0];
        child_pid_ = pid;
        return;
    }

    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(endpoint_.port);
    if (int rc = ::getaddrinfo(endpoint_.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
        throw PriorError("cannot resolve " + endpoint_.host + ": " + ::gai_strerror(rc));
    }
    int fd = -1;
    for (addrinfo* p = res; p != nullptr; p = p->ai_next) {
        fd = ::socket(p->ai_family, p->ai_socktype | SOCK_CLOEXEC, p->ai_protocol);
        if (fd < 0) {
            continue;
        }
        if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) {
            break;
        }
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) {
        throw PriorError("cannot connect to plugin at " + endpoint_.to_string());
    }
    read_fd_ = fd;
    write_fd_ = fd;
}

PluginClient::~PluginClient() {
    close_transport();
}

void PluginClient::close_transport() {
    if (write_fd_ >= 0 && write_fd_ != read_fd_) {
        ::close(write_fd_);
    }
    if (read_fd_ >= 0) {
        ::close(read_fd_);
    }
    read_fd_ = write_fd_ = -1;
    if (child_pid_ > 0) {
        int status = 0;
        // Closing stdin asks the plugin to exit; give it a moment before
        // terminating it.
        for (int i = 0; i < 50; ++i) {
            if (::waitpid(child_pid_, &status, WNOHANG) == child_pid_) {
                child_pid_ = -1;
                return;
            }
            ::usleep(10000);
        }
        ::kill(child_pid_, SIGTERM);
        ::waitpid(child_pid_, &status, 0);
        child_pid_ = -1;
    }
}

void PluginClient::write_line(const std::string& line) {
    if (write_fd_ < 0) {
        throw PriorError("plugin connection is closed");
    }
    std::size_t sent = 0;
    while (sent < line.size()) {
        const ssize_t n = endpoint_.transport == PluginEndpoint::Transport::Tcp
                              ? ::send(write_fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL)
                              : ::write(write_fd_, line.data() + sent, line.size() - sent);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw PriorError(std::string("writing to plugin failed: ") + std::strerror(errno));
        }
        sent += static_cast<std::size_t>(n);
    }
}

std::string PluginClient::read_line() {
    while (true) {
        if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        pollfd pfd{read_fd_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, endpoint_.timeout_ms);
        if (rc == 0) {
            throw PriorError("plugin timed out after " + std::to_string(endpoint_.timeout_ms) + " ms");
        }
        if (rc < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw PriorError(std::string("poll on plugin failed: ") + std::strerror(errno));
        }
        char chunk[4096];
        const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw PriorError(std::string("reading from plugin failed: ") + std::strerror(errno));
        }
        if (n == 0) {
            throw PriorError("plugin closed the connection");
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::vector<LogProb> PluginClient::score(const LMQuery& query) {
    if (query.candidates.empty()) {
        throw std::invalid_argument("plugin query needs at least one candidate");
    }
    const std::uint64_t id = next_id_++;
    write_line(make_plugin_request(id, query).dump() + "\n");
    return parse_plugin_response(read_line(), id, query.candidates.size());
}

} // namespace noisyspell
