#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qgp/bytes.hpp"
#include "qgp/qkd.hpp"

namespace qgp::keysvc {

using KeyId = std::array<std::uint8_t, 16>;

enum class Op : std::uint8_t { GetKey, GetKeyById, Status };

enum class ErrorCode : std::uint8_t {
    None,
    AlarmActive,
    InsufficientKey,
    UnknownKeyId,
    AlreadyConsumed,
    BadRequest,
};

std::string error_code_name(ErrorCode code);

struct KeyRequest {
    Op op = Op::Status;
    std::string requester;
    std::string peer;
    std::uint64_t size_bits = 0;  // get_key
    KeyId key_id{};               // get_key_by_id
};

struct KeyResponse {
    bool ok = false;
    ErrorCode code = ErrorCode::None;
    KeyId key_id{};
    Bytes key;                    // size_bits rounded up to bytes, surplus zero
    std::uint64_t size_bits = 0;
    double qber = 0.0;
    std::uint64_t stored_bits = 0;
    bool alarm = false;
};

/// Buffers distilled session keys and serves them as matched one-time pads:
/// get_key hands fresh material to the requester and reserves it for the
/// named peer, who collects the same bytes exactly once via get_key_by_id.
/// While the QBER alarm is raised no request can extract key bytes.
/// All entry points are serialized internally (linearizable).
class KeyPool {
public:
    /// False when the key_id is already present (pool unchanged).
    bool ingest(const qkd::SessionKeyMaterial& material);

    void raise_alarm(double qber);
    void clear_alarm();

    KeyResponse serve(const KeyRequest& request);

    std::uint64_t stored_bits() const;
    bool alarm() const;
    double last_qber() const;

private:
    enum class State : std::uint8_t { Available, Reserved, Consumed };

    struct Entry {
        std::vector<std::uint8_t> key_bits;
        std::uint64_t created_at;
        State state = State::Available;
        std::string requester;
        std::string peer;
        std::uint64_t served_bits = 0;  // size the requester asked for
    };

    KeyResponse serve_locked(const KeyRequest& request);

    mutable std::mutex mutex_;
    std::map<KeyId, Entry> entries_;
    std::uint64_t next_created_ = 0;
    bool alarm_ = false;
    double last_qber_ = 0.0;
};

/// First size_bits bits packed LSB-first into whole bytes, surplus zeroed.
Bytes clip_key_bits(const std::vector<std::uint8_t>& bits, std::uint64_t size_bits);

}  // namespace qgp::keysvc
