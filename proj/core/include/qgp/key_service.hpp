#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "qgp/key_pool.hpp"
#include "qgp/key_wire.hpp"

namespace qgp::keysvc {

/// Blocking TCP front end for a KeyPool: one thread per connection, one
/// length-prefixed JSON request per frame, one response per request.
/// Linearizability comes from the pool's internal lock.
class KeyServer {
public:
    /// addr is "host:port"; port 0 picks a free port (see port()).
    KeyServer(KeyPool& pool, const std::string& addr);
    ~KeyServer();

    KeyServer(const KeyServer&) = delete;
    KeyServer& operator=(const KeyServer&) = delete;

    std::uint16_t port() const { return port_; }
    void stop();

private:
    void accept_loop();
    void serve_connection(int fd);

    KeyPool& pool_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> running_{false};
    std::thread accept_thread_;
    std::mutex conn_mutex_;
    std::vector<std::thread> conn_threads_;
};

/// One-request-per-call client; reconnects for each request.
class KeyClient {
public:
    explicit KeyClient(const std::string& addr);

    KeyResponse request(const KeyRequest& req) const;

private:
    std::string host_;
    std::uint16_t port_;
};

/// Splits "host:port"; throws std::invalid_argument on a malformed address.
std::pair<std::string, std::uint16_t> parse_addr(const std::string& addr);

}  // namespace qgp::keysvc
