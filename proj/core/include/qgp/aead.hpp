#pragma once

#include <array>
#include <optional>

#include "qgp/bytes.hpp"

namespace qgp {

inline constexpr std::size_t kAeadKeyLen = 32;
inline constexpr std::size_t kAeadNonceLen = 12;
inline constexpr std::size_t kAeadTagLen = 16;

using AeadKey = std::array<std::uint8_t, kAeadKeyLen>;
using AeadNonce = std::array<std::uint8_t, kAeadNonceLen>;

/// AES-256-GCM. Ciphertext carries the 16-byte tag appended.
Bytes aead_seal(const AeadKey& key, const AeadNonce& nonce, ByteView associated_data,
                ByteView plaintext);

/// Returns nullopt on authentication failure (a value, never a throw).
std::optional<Bytes> aead_open(const AeadKey& key, const AeadNonce& nonce,
                               ByteView associated_data, ByteView ciphertext);

}  // namespace qgp
