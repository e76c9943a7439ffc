#pragma once

#include <cstdint>

#include "qgp/bytes.hpp"

namespace qgp::dilithium3 {

inline constexpr std::size_t kPublicKeyBytes = 1952;
inline constexpr std::size_t kSecretKeyBytes = 4000;
inline constexpr std::size_t kSignatureBytes = 3293;
inline constexpr std::size_t kKeygenSeedBytes = 32;

struct SigKeyPair {
    Bytes public_key;
    Bytes secret_key;
};

/// Deterministic keypair expansion from a 32-byte seed.
SigKeyPair sig_keygen(ByteView seed);

/// Deterministic signing (the hedged/randomized variant is not used).
Bytes sign(ByteView secret_key, ByteView message);

/// False on any invalid signature, including wrong length or a malformed
/// hint encoding; throws only on a wrong-sized public key.
bool verify(ByteView public_key, ByteView message, ByteView signature);

}  // namespace qgp::dilithium3
