#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "noisyspell/langmodel.hpp"

using namespace noisyspell;

namespace {

PluginEndpoint echo(const std::string& mode, int timeout_ms = 5000) {
    auto e = PluginEndpoint::parse(std::string("stdio:") + ECHO_LM_PATH + " " + mode);
    e.timeout_ms = timeout_ms;
    return e;
}

const LMQuery query{{"a", "b"}, {"c"}, {"x", "y", "z"}};

// One-connection TCP server answering uniform scores.
class UniformServer {
public:
    UniformServer() {
        listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = 0;
        REQUIRE(::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
        REQUIRE(::listen(listen_fd_, 1) == 0);
        socklen_t len = sizeof addr;
        ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
        thread_ = std::thread([this] { serve(); });
    }
    ~UniformServer() {
        thread_.join();
        ::close(listen_fd_);
    }
    int port() const { return port_; }
    int requests() const { return requests_; }

private:
    void serve() {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        std::string buf;
        char chunk[4096];
        for (;;) {
            const ssize_t n = ::read(fd, chunk, sizeof chunk);
            if (n <= 0) {
                break;
            }
            buf.append(chunk, static_cast<std::size_t>(n));
            std::size_t nl;
            while ((nl = buf.find('\n')) != std::string::npos) {
                const auto req = nlohmann::json::parse(buf.substr(0, nl));
                buf.erase(0, nl + 1);
                ++requests_;
                const auto k = req["candidates"].size();
                nlohmann::json resp{{"id", req["id"]},
                                    {"logprobs", std::vector<double>(k, -std::log(static_cast<double>(k)))}};
                const std::string line = resp.dump() + "\n";
                (void)!::write(fd, line.data(), line.size());
            }
        }
        ::close(fd);
    }

    int listen_fd_ = -1;
    int port_ = 0;
    std::atomic<int> requests_{0};
    std::thread thread_;
};

} // namespace

TEST_CASE("endpoint parsing") {
    const auto s = PluginEndpoint::parse("stdio:python3 serve.py --x");
    CHECK(s.transport == PluginEndpoint::Transport::Subprocess);
    CHECK(s.command == "python3 serve.py --x");
    const auto t = PluginEndpoint::parse("tcp:localhost:8765");
    CHECK(t.transport == PluginEndpoint::Transport::Tcp);
    CHECK(t.host == "localhost");
    CHECK(t.port == 8765);
    CHECK(PluginEndpoint::parse(t.to_string()).port == 8765);
    CHECK_THROWS(PluginEndpoint::parse("stdio:"));
    CHECK_THROWS(PluginEndpoint::parse("tcp:host"));
    CHECK_THROWS(PluginEndpoint::parse("tcp:host:http"));
    CHECK_THROWS(PluginEndpoint::parse("http://x"));
}

TEST_CASE("request shape") {
    const auto j = make_plugin_request(7, query);
    CHECK(j["v"] == 1);
    CHECK(j["id"] == 7);
    CHECK(j["left"] == nlohmann::json{"a", "b"});
    CHECK(j["right"] == nlohmann::json{"c"});
    CHECK(j["candidates"] == nlohmann::json{"x", "y", "z"});
}

TEST_CASE("response validation") {
    CHECK(parse_plugin_response(R"({"id":3,"logprobs":[-1,-2]})", 3, 2) == std::vector<LogProb>{-1, -2});
    CHECK(parse_plugin_response(R"({"id":3,"logprobs":[1e-9]})", 3, 1) == std::vector<LogProb>{0});
    CHECK_THROWS_AS(parse_plugin_response(R"({"id":4,"logprobs":[-1]})", 3, 1), PriorError);
    CHECK_THROWS_AS(parse_plugin_response(R"({"id":3,"logprobs":[-1]})", 3, 2), PriorError);
    CHECK_THROWS_AS(parse_plugin_response(R"({"id":3,"logprobs":[0.5]})", 3, 1), PriorError);
    CHECK_THROWS_AS(parse_plugin_response(R"({"id":3,"logprobs":[null]})", 3, 1), PriorError);
    CHECK_THROWS_AS(parse_plugin_response(R"({"id":3,"logprobs":["a"]})", 3, 1), PriorError);
    CHECK_THROWS_AS(parse_plugin_response(R"({"id":3})", 3, 1), PriorError);
    CHECK_THROWS_AS(parse_plugin_response("not json", 3, 1), PriorError);
    try {
        parse_plugin_response(R"({"id":3,"error":"out of memory"})", 3, 1);
        FAIL("expected an error");
    } catch (const PriorError& e) {
        CHECK(std::string(e.what()).find("out of memory") != std::string::npos);
    }
}

TEST_CASE("subprocess plugin scores in order") {
    PluginClient client(echo("uniform"));
    for (int i = 0; i < 20; ++i) {
        const auto s = client.score(query);
        REQUIRE(s.size() == 3);
        CHECK(s[0] == doctest::Approx(-std::log(3.0)));
        CHECK(s[0] == s[2]);
    }
    const auto one = client.score({{}, {}, {"only"}});
    REQUIRE(one.size() == 1);
    CHECK(one[0] == 0);
    CHECK_THROWS_AS(client.score({{}, {}, {}}), std::invalid_argument);
}

TEST_CASE("preferences come through") {
    PluginClient client(echo("prefer:y"));
    const auto s = client.score(query);
    CHECK(s[1] == 0);
    CHECK(s[0] == -10);
}

TEST_CASE("faulty backends raise prior errors") {
    for (const char* mode : {"bad-id", "short", "positive", "string", "garbage", "exit"}) {
        CAPTURE(mode);
        PluginClient client(echo(mode));
        CHECK_THROWS_AS(client.score(query), PriorError);
    }
    PluginClient tiny(echo("tiny"));
    CHECK(tiny.score(query)[0] == 0);
}

TEST_CASE("backend error message is passed on") {
    PluginClient client(echo("error"));
    try {
        client.score(query);
        FAIL("expected an error");
    } catch (const PriorError& e) {
        CHECK(std::string(e.what()).find("model not loaded") != std::string::npos);
    }
}

TEST_CASE("silent backend times out") {
    PluginClient client(echo("silent", 200));
    CHECK_THROWS_WITH_AS(client.score(query), doctest::Contains("timed out"), PriorError);
}

TEST_CASE("missing command fails on first use") {
    auto e = PluginEndpoint::parse("stdio:/nonexistent/lm-server");
    e.timeout_ms = 2000;
    CHECK_THROWS_AS(
        {
            PluginClient client(e);
            client.score(query);
        },
        PriorError);
}

TEST_CASE("tcp transport") {
    UniformServer server;
    {
        PluginClient client(PluginEndpoint::parse("tcp:127.0.0.1:" + std::to_string(server.port())));
        for (int i = 0; i < 5; ++i) {
            const auto s = client.score(query);
            CHECK(s.size() == 3);
            CHECK(s[1] == doctest::Approx(-std::log(3.0)));
        }
    }
    CHECK(server.requests() == 5);
}

TEST_CASE("refused tcp connection") {
    CHECK_THROWS_AS(PluginClient(PluginEndpoint::parse("tcp:127.0.0.1:1")), PriorError);
}
