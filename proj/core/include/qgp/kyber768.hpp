#pragma once

#include <array>
#include <cstdint>

#include "qgp/bytes.hpp"

namespace qgp::kyber768 {

inline constexpr std::size_t kPublicKeyBytes = 1184;
inline constexpr std::size_t kSecretKeyBytes = 2400;
inline constexpr std::size_t kCiphertextBytes = 1088;
inline constexpr std::size_t kSharedSecretBytes = 32;
inline constexpr std::size_t kKeygenSeedBytes = 64;  // d || z
inline constexpr std::size_t kEncapsSeedBytes = 32;

using SharedSecret = std::array<std::uint8_t, kSharedSecretBytes>;

struct KemKeyPair {
    Bytes public_key;
    Bytes secret_key;
};

struct EncapsResult {
    Bytes ciphertext;
    SharedSecret shared_secret;
};

/// Deterministic key generation from a 64-byte seed (CPA seed d, followed by
/// the implicit-rejection value z).
KemKeyPair kem_keygen(ByteView seed);

/// Deterministic encapsulation; the 32-byte seed plays the role of the
/// caller-supplied randomness m.
EncapsResult encaps(ByteView public_key, ByteView seed);

/// Never fails on a well-sized ciphertext: a mismatched re-encryption yields
/// the implicit-rejection secret derived from z.
SharedSecret decaps(ByteView secret_key, ByteView ciphertext);

}  // namespace qgp::kyber768
