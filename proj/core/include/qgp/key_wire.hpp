#pragma once

#include <optional>
#include <string>

#include "qgp/bytes.hpp"
#include "qgp/key_pool.hpp"

namespace qgp::keysvc {

// Wire format: 4-byte big-endian length, then that many bytes of UTF-8 JSON.
// Request fields: op, requester, peer, size_bits, key_id (32 lowercase hex
// chars). Response fields: status, key_id, key (base64), size_bits, qber,
// stored_bits, alarm, code. Unknown fields are ignored; missing or
// ill-typed required fields map to BAD_REQUEST.

inline constexpr std::size_t kMaxFrameBytes = 1 << 20;

Bytes frame(ByteView payload);

/// Parses a request payload. nullopt means the caller must answer
/// BAD_REQUEST: the JSON was invalid or a required field was missing.
std::optional<KeyRequest> parse_request(ByteView payload);

Bytes encode_request(const KeyRequest& request);
Bytes encode_response(const KeyResponse& response);

/// Throws std::runtime_error on a malformed frame.
KeyResponse parse_response(ByteView payload);

}  // namespace qgp::keysvc
