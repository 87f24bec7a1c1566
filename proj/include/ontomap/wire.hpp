#pragma once
// Line-delimited JSON translator protocol.
//
//   {"op":"hello"}                                   -> {"capabilities":[...],"embed_dim":d,"concurrent":b}
//   {"op":"score_tokens","task":t,"source":s,
//    "prefix":[tokens],"allowed":[tokens]}           -> {"scores":[x, ...]}
//   {"op":"embed","task":t,"text":s}                 -> {"vector":[x, ...]}
//   failures                                         -> {"error":code,"message":m}
//
// One message per line, over a child process's stdin/stdout or a TCP socket.

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ontomap/error.hpp"
#include "ontomap/translator.hpp"

namespace ontomap {

class LineChannel {
public:
    virtual ~LineChannel() = default;
    virtual void write_line(std::string_view line) = 0;
    // nullopt on end of stream.
    virtual std::optional<std::string> read_line() = 0;
};

// Reads from one descriptor and writes to another (they may be the same socket).
class FdChannel : public LineChannel {
public:
    FdChannel(int read_fd, int write_fd, bool owns, int timeout_ms = 120000)
        : read_fd_(read_fd), write_fd_(write_fd), owns_(owns), timeout_ms_(timeout_ms) {}

    FdChannel(const FdChannel&) = delete;
    FdChannel& operator=(const FdChannel&) = delete;

    ~FdChannel() override { close_all(); }

    void write_line(std::string_view line) override {
        std::string buf(line);
        buf += '\n';
        size_t done = 0;
        while (done < buf.size()) {
            ssize_t n = ::write(write_fd_, buf.data() + done, buf.size() - done);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw Error(Errc::TranslatorError, std::string("write failed: ") + std::strerror(errno));
            }
            done += static_cast<size_t>(n);
        }
    }

    std::optional<std::string> read_line() override {
        while (true) {
            size_t nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return line;
            }
            if (eof_) {
                if (buffer_.empty()) return std::nullopt;
                std::string line = std::move(buffer_);
                buffer_.clear();
                return line;
            }
            if (timeout_ms_ > 0) {
                pollfd p{read_fd_, POLLIN, 0};
                int r = ::poll(&p, 1, timeout_ms_);
                if (r == 0) throw Error(Errc::TranslatorError, "timed out waiting for a reply");
                if (r < 0 && errno != EINTR)
                    throw Error(Errc::TranslatorError, std::string("poll failed: ") + std::strerror(errno));
                if (r < 0) continue;
            }
            char chunk[65536];
            ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw Error(Errc::TranslatorError, std::string("read failed: ") + std::strerror(errno));
            }
            if (n == 0) eof_ = true;
            buffer_.append(chunk, static_cast<size_t>(n));
        }
    }

    void close_write() {
        if (owns_ && write_fd_ >= 0 && write_fd_ != read_fd_) {
            ::close(write_fd_);
            write_fd_ = -1;
        }
    }

private:
    void close_all() {
        if (!owns_) return;
        if (read_fd_ >= 0) ::close(read_fd_);
        if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
        read_fd_ = write_fd_ = -1;
    }

    int read_fd_;
    int write_fd_;
    bool owns_;
    int timeout_ms_;
    std::string buffer_;
    bool eof_ = false;
};

// Runs `/bin/sh -c command` with its stdin/stdout connected to the channel.
class ProcessChannel : public LineChannel {
public:
    explicit ProcessChannel(const std::string& command, int timeout_ms = 120000) {
        int to_child[2], from_child[2];
        if (::pipe(to_child) != 0) throw Error(Errc::TranslatorError, "pipe failed");
        if (::pipe(from_child) != 0) {
            ::close(to_child[0]);
            ::close(to_child[1]);
            throw Error(Errc::TranslatorError, "pipe failed");
        }
        pid_ = ::fork();
        if (pid_ < 0) throw Error(Errc::TranslatorError, "fork failed");
        if (pid_ == 0) {
            ::dup2(to_child[0], STDIN_FILENO);
            ::dup2(from_child[1], STDOUT_FILENO);
            ::close(to_child[0]);
            ::close(to_child[1]);
            ::close(from_child[0]);
            ::close(from_child[1]);
            ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(to_child[0]);
        ::close(from_child[1]);
        ::fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
        ::fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
        channel_ = std::make_unique<FdChannel>(from_child[0], to_child[1], true, timeout_ms);
    }

    ~ProcessChannel() override {
        channel_->close_write();
        channel_.reset();
        if (pid_ > 0) {
            int status = 0;
            ::waitpid(pid_, &status, 0);
        }
    }

    void write_line(std::string_view line) override { channel_->write_line(line); }
    std::optional<std::string> read_line() override { return channel_->read_line(); }

private:
    pid_t pid_ = -1;
    std::unique_ptr<FdChannel> channel_;
};

inline std::unique_ptr<FdChannel> tcp_connect(const std::string& host, const std::string& port,
                                              int timeout_ms = 120000) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res);
    if (rc != 0) throw Error(Errc::TranslatorError, "cannot resolve " + host + ": " + ::gai_strerror(rc));
    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) throw Error(Errc::TranslatorError, "cannot connect to " + host + ":" + port);
    return std::make_unique<FdChannel>(fd, fd, true, timeout_ms);
}

// Loopback listener used by `ontomap serve --listen` and the tests.
class TcpListener {
public:
    explicit TcpListener(uint16_t port = 0) {
        fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
        if (fd_ < 0) throw Error(Errc::IoError, "socket failed");
        int one = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = htons(port);
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 8) != 0) {
            ::close(fd_);
            throw Error(Errc::IoError, std::string("cannot listen: ") + std::strerror(errno));
        }
        socklen_t len = sizeof addr;
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
    }

    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;
    ~TcpListener() {
        if (fd_ >= 0) ::close(fd_);
    }

    uint16_t port() const { return port_; }

    std::unique_ptr<FdChannel> accept() {
        int c = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (c < 0) throw Error(Errc::IoError, std::string("accept failed: ") + std::strerror(errno));
        return std::make_unique<FdChannel>(c, c, true, 0);
    }

private:
    int fd_ = -1;
    uint16_t port_ = 0;
};

inline nlohmann::json error_reply(std::string_view code, std::string_view message) {
    return {{"error", code}, {"message", message}};
}

// Answers one request with `translator`; never throws.
inline nlohmann::json handle_request(Translator& translator, const TaskRegistry& tasks, const nlohmann::json& req) {
    try {
        if (!req.is_object() || !req.contains("op") || !req["op"].is_string())
            return error_reply("ProtocolError", "request must be an object with a string 'op'");
        const std::string op = req["op"];
        if (op == "hello") {
            TranslatorInfo info = translator.info();
            return {{"capabilities", info.capabilities}, {"embed_dim", info.embed_dim}, {"concurrent", info.concurrent}};
        }
        if (op != "score_tokens" && op != "embed") return error_reply("ProtocolError", "unknown op '" + op + "'");
        if (!req.contains("task") || !req["task"].is_string())
            return error_reply("ProtocolError", "missing string 'task'");
        const TaskId& task = tasks.get(req["task"].get<std::string>());
        if (op == "score_tokens") {
            if (!req.contains("source") || !req["source"].is_string() || !req.contains("prefix") ||
                !req["prefix"].is_array() || !req.contains("allowed") || !req["allowed"].is_array())
                return error_reply("ProtocolError", "score_tokens needs source, prefix[], allowed[]");
            auto prefix = req["prefix"].get<std::vector<std::string>>();
            auto allowed = req["allowed"].get<std::vector<std::string>>();
            auto scores = translator.score_tokens(task, req["source"].get<std::string>(), prefix, allowed);
            return {{"scores", scores}};
        }
        if (!req.contains("text") || !req["text"].is_string()) return error_reply("ProtocolError", "embed needs text");
        return {{"vector", translator.embed(task, req["text"].get<std::string>())}};
    } catch (const Error& e) {
        return error_reply(errc_name(e.code()), e.message());
    } catch (const std::exception& e) {
        return error_reply("ProtocolError", e.what());
    }
}

inline std::string handle_line(Translator& translator, const TaskRegistry& tasks, std::string_view line) {
    auto req = nlohmann::json::parse(line, nullptr, false);
    if (req.is_discarded()) return error_reply("ProtocolError", "malformed JSON").dump();
    return handle_request(translator, tasks, req).dump();
}

// Serves requests until end of stream.
inline void serve(Translator& translator, const TaskRegistry& tasks, LineChannel& channel) {
    while (auto line = channel.read_line()) {
        if (line->empty()) continue;
        channel.write_line(handle_line(translator, tasks, *line));
    }
}

inline void serve(Translator& translator, const TaskRegistry& tasks, std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out << handle_line(translator, tasks, line) << '\n' << std::flush;
    }
}

// Engine-side client. Calls are serialized over one connection.
class WireTranslator : public Translator {
public:
    explicit WireTranslator(std::unique_ptr<LineChannel> channel) : channel_(std::move(channel)) {
        ::signal(SIGPIPE, SIG_IGN);
        auto reply = call({{"op", "hello"}});
        if (!reply.contains("capabilities") || !reply["capabilities"].is_array())
            throw Error(Errc::TranslatorError, "hello reply lacks capabilities");
        info_.capabilities = reply["capabilities"].get<std::vector<std::string>>();
        info_.embed_dim = reply.value("embed_dim", size_t{0});
        info_.concurrent = reply.value("concurrent", false);
    }

    // "exec:<command>", "tcp:<host>:<port>" or "<host>:<port>".
    static std::unique_ptr<WireTranslator> connect(std::string_view address, int timeout_ms = 120000) {
        std::string addr(address);
        if (addr.rfind("exec:", 0) == 0)
            return std::make_unique<WireTranslator>(std::make_unique<ProcessChannel>(addr.substr(5), timeout_ms));
        if (addr.rfind("tcp:", 0) == 0) addr = addr.substr(4);
        if (addr.rfind("//", 0) == 0) addr = addr.substr(2);
        size_t colon = addr.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == addr.size())
            throw Error(Errc::TranslatorError, "bad translator address '" + std::string(address) + "'");
        return std::make_unique<WireTranslator>(tcp_connect(addr.substr(0, colon), addr.substr(colon + 1), timeout_ms));
    }

    TranslatorInfo info() override { return info_; }

    std::vector<double> score_tokens(const TaskId& task, std::string_view source, std::span<const std::string> prefix,
                                     std::span<const std::string> allowed) override {
        nlohmann::json req = {{"op", "score_tokens"},
                              {"task", task.name},
                              {"source", source},
                              {"prefix", std::vector<std::string>(prefix.begin(), prefix.end())},
                              {"allowed", std::vector<std::string>(allowed.begin(), allowed.end())}};
        return numbers(call(req), "scores");
    }

    std::vector<double> embed(const TaskId& task, std::string_view text) override {
        return numbers(call({{"op", "embed"}, {"task", task.name}, {"text", text}}), "vector");
    }

private:
    nlohmann::json call(const nlohmann::json& req) {
        std::lock_guard lock(mutex_);
        channel_->write_line(req.dump());
        auto line = channel_->read_line();
        if (!line) throw Error(Errc::TranslatorError, "translator closed the connection");
        auto reply = nlohmann::json::parse(*line, nullptr, false);
        if (reply.is_discarded() || !reply.is_object()) throw Error(Errc::TranslatorError, "malformed reply: " + *line);
        if (reply.contains("error")) {
            std::string code = reply["error"].is_string() ? reply["error"].get<std::string>() : reply["error"].dump();
            throw Error(Errc::TranslatorError, code + ": " + reply.value("message", std::string{}));
        }
        return reply;
    }

    static std::vector<double> numbers(const nlohmann::json& reply, const char* key) {
        if (!reply.contains(key) || !reply[key].is_array())
            throw Error(Errc::TranslatorError, std::string("reply lacks '") + key + "'");
        std::vector<double> out;
        for (const auto& x : reply[key]) {
            if (!x.is_number()) throw Error(Errc::TranslatorError, std::string("non-numeric entry in '") + key + "'");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::unique_ptr<LineChannel> channel_;
    TranslatorInfo info_;
    std::mutex mutex_;
};

} // namespace ontomap
