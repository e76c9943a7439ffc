#include "qgp/key_service.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <stdexcept>

namespace qgp::keysvc {

namespace {

bool read_exact(int fd, std::uint8_t* buf, std::size_t len) {
    std::size_t got = 0;
    while (got < len) {
        ssize_t n = ::recv(fd, buf + got, len - got, 0);
        if (n <= 0) return false;
        got += static_cast<std::size_t>(n);
    }
    return true;
}

bool write_all(int fd, const std::uint8_t* buf, std::size_t len) {
    std::size_t sent = 0;
    while (sent < len) {
        ssize_t n = ::send(fd, buf + sent, len - sent, MSG_NOSIGNAL);
        if (n <= 0) return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

bool send_frame(int fd, ByteView payload) {
    Bytes framed = frame(payload);
    return write_all(fd, framed.data(), framed.size());
}

// Returns false on EOF/error; oversized frames poison the connection.
bool read_frame(int fd, Bytes& payload) {
    std::uint8_t header[4];
    if (!read_exact(fd, header, 4)) return false;
    std::uint32_t len = get_u32_be(header);
    if (len > kMaxFrameBytes) return false;
    payload.resize(len);
    return len == 0 || read_exact(fd, payload.data(), len);
}

}  // namespace

std::pair<std::string, std::uint16_t> parse_addr(const std::string& addr) {
    auto colon = addr.rfind(':');
    if (colon == std::string::npos || colon + 1 >= addr.size()) {
        throw std::invalid_argument("address must be host:port");
    }
    std::string host = addr.substr(0, colon);
    if (host.empty()) host = "127.0.0.1";
    int port = std::stoi(addr.substr(colon + 1));
    if (port < 0 || port > 65535) throw std::invalid_argument("port out of range");
    return {host, static_cast<std::uint16_t>(port)};
}

KeyServer::KeyServer(KeyPool& pool, const std::string& addr) : pool_(pool) {
    auto [host, port] = parse_addr(addr);

    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("socket() failed");
    int yes = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);

    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1) {
        ::close(listen_fd_);
        throw std::invalid_argument("listen host must be an IPv4 address");
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
        ::close(listen_fd_);
        throw std::runtime_error("bind() failed");
    }
    if (::listen(listen_fd_, 16) != 0) {
        ::close(listen_fd_);
        throw std::runtime_error("listen() failed");
    }

    socklen_t slen = sizeof sa;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&sa), &slen);
    port_ = ntohs(sa.sin_port);

    running_ = true;
    accept_thread_ = std::thread([this] { accept_loop(); });
}

KeyServer::~KeyServer() { stop(); }

void KeyServer::stop() {
    bool was_running = running_.exchange(false);
    if (!was_running) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (accept_thread_.joinable()) accept_thread_.join();
    std::lock_guard lock(conn_mutex_);
    for (auto& t : conn_threads_) {
        if (t.joinable()) t.join();
    }
    conn_threads_.clear();
}

void KeyServer::accept_loop() {
    while (running_) {
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (!running_) break;
            continue;
        }
        std::lock_guard lock(conn_mutex_);
        conn_threads_.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void KeyServer::serve_connection(int fd) {
    Bytes payload;
    while (running_ && read_frame(fd, payload)) {
        KeyResponse resp;
        auto req = parse_request(payload);
        if (req.has_value()) {
            resp = pool_.serve(*req);
        } else {
            resp.ok = false;
            resp.code = ErrorCode::BadRequest;
        }
        if (!send_frame(fd, encode_response(resp))) break;
    }
    ::close(fd);
}

KeyClient::KeyClient(const std::string& addr) {
    auto [host, port] = parse_addr(addr);
    host_ = host;
    port_ = port;
}

KeyResponse KeyClient::request(const KeyRequest& req) const {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("socket() failed");

    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(port_);
    if (::inet_pton(AF_INET, host_.c_str(), &sa.sin_addr) != 1) {
        ::close(fd);
        throw std::invalid_argument("key service host must be an IPv4 address");
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
        ::close(fd);
        throw std::runtime_error("cannot connect to key service");
    }

    Bytes payload;
    bool ok = send_frame(fd, encode_request(req)) && read_frame(fd, payload);
    ::close(fd);
    if (!ok) throw std::runtime_error("key service connection dropped");
    return parse_response(payload);
}

}  // namespace qgp::keysvc
