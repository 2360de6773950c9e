#include "qbc/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <utility>

#include "qbc/errors.hpp"

namespace qbc::transport {

namespace {

[[noreturn]] void sys_fail(const std::string& what) {
    throw ProtocolError(what + ": " + std::strerror(errno));
}

// At end of stream an unterminated fragment is returned as the last line.
std::optional<std::string> take_tail(std::string& buffer) {
    if (buffer.empty()) return std::nullopt;
    return std::exchange(buffer, {});
}

// One direction of an in-memory pipe.
struct Channel {
    std::mutex mu;
    std::condition_variable cv;
    std::string data;
    bool closed = false;
};

class PipeEnd : public ByteStream {
public:
    PipeEnd(std::shared_ptr<Channel> in, std::shared_ptr<Channel> out) : in_(std::move(in)), out_(std::move(out)) {}
    ~PipeEnd() override { close(); }

    void write(std::string_view bytes) override {
        std::lock_guard lock(out_->mu);
        if (out_->closed) throw ProtocolError("write on closed pipe");
        out_->data.append(bytes);
        out_->cv.notify_all();
    }

    std::optional<std::string> read_line() override {
        std::unique_lock lock(in_->mu);
        for (;;) {
            const auto nl = in_->data.find('\n');
            if (nl != std::string::npos) {
                std::string line = in_->data.substr(0, nl);
                in_->data.erase(0, nl + 1);
                return line;
            }
            if (in_->closed) return take_tail(in_->data);
            in_->cv.wait(lock);
        }
    }

    void close() override {
        std::lock_guard lock(out_->mu);
        out_->closed = true;
        out_->cv.notify_all();
    }

private:
    std::shared_ptr<Channel> in_, out_;
};

}  // namespace

void ByteStream::write_message(const Message& msg) {
    std::string line = encode(msg);
    line += '\n';
    write(line);
}

std::optional<Message> ByteStream::read_message() {
    auto line = read_line();
    if (!line) return std::nullopt;
    return decode(*line);
}

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe() {
    auto a = std::make_shared<Channel>();
    auto b = std::make_shared<Channel>();
    return {std::make_unique<PipeEnd>(a, b), std::make_unique<PipeEnd>(b, a)};
}

// ------------------------------------------------------------------- socket

SocketStream::SocketStream(int fd) : fd_(fd) {}

SocketStream::~SocketStream() {
    if (fd_ >= 0) ::close(fd_);
}

void SocketStream::write(std::string_view bytes) {
    while (!bytes.empty()) {
        const ssize_t n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            sys_fail("send");
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
}

std::optional<std::string> SocketStream::read_line() {
    for (;;) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            sys_fail("recv");
        }
        if (n == 0) return take_tail(buffer_);
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

void SocketStream::close() {
    if (!write_closed_ && fd_ >= 0) ::shutdown(fd_, SHUT_WR);
    write_closed_ = true;
}

namespace {

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr)
        throw ProtocolError("cannot resolve host '" + host + "'");
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    ::freeaddrinfo(res);
    return addr;
}

}  // namespace

Listener::Listener(const std::string& host, std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) sys_fail("socket");
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = resolve(host, port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 1) < 0) {
        const int err = errno;
        ::close(fd_);
        errno = err;
        sys_fail("bind/listen on " + host + ":" + std::to_string(port));
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

Listener::~Listener() { ::close(fd_); }

std::unique_ptr<SocketStream> Listener::accept() {
    for (;;) {
        const int fd = ::accept(fd_, nullptr, nullptr);
        if (fd >= 0) return std::make_unique<SocketStream>(fd);
        if (errno != EINTR) sys_fail("accept");
    }
}

std::unique_ptr<SocketStream> connect_to(const std::string& host, std::uint16_t port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) sys_fail("socket");
    sockaddr_in addr = resolve(host, port);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        const int err = errno;
        ::close(fd);
        errno = err;
        sys_fail("connect to " + host + ":" + std::to_string(port));
    }
    return std::make_unique<SocketStream>(fd);
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& spec) {
    const auto colon = spec.rfind(':');
    const std::string host = colon == std::string::npos || colon == 0 ? "127.0.0.1" : spec.substr(0, colon);
    const std::string port_text = colon == std::string::npos ? spec : spec.substr(colon + 1);
    std::size_t used = 0;
    long port = -1;
    try {
        port = std::stol(port_text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != port_text.size() || port < 0 || port > 65535)
        throw ParameterError("bad endpoint '" + spec + "', expected host:port");
    return {host, static_cast<std::uint16_t>(port)};
}

}  // namespace qbc::transport
