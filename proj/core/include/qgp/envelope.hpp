#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <variant>

#include "qgp/bytes.hpp"
#include "qgp/hash.hpp"
#include "qgp/key_pool.hpp"
#include "qgp/sha3.hpp"

namespace qgp::codec {

using keysvc::KeyId;
using Nonce = std::array<std::uint8_t, 12>;

inline constexpr std::array<std::uint8_t, 4> kMagic = {'Q', 'G', 'P', '1'};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::uint8_t kSuiteSha3 = 0x01;  // SHA3-256 / Dilithium3 / Kyber768 / AES-256-GCM / DEFLATE
inline constexpr std::uint8_t kSuiteSha2 = 0x02;  // same suite with SHA2-256 as H
inline constexpr std::uint8_t kFlagQkd = 0x01;    // bit0: one-time QKD session key layer
inline constexpr std::uint8_t kFlagKyber = 0x02;  // bit1: Kyber KEM layer
inline constexpr std::size_t kMaxMessageBytes = (1ull << 32) - 1024;

// On-wire layout, all integers big-endian:
//   magic(4) version(1) suite(1) flags(1) reserved(1) key_id(16)
//   kem_ct_len(4) kem_ct nonce_outer(12) nonce_inner(12) body_len(4) body
struct QgpEnvelope {
    std::uint8_t version = kVersion;
    std::uint8_t suite = kSuiteSha3;
    std::uint8_t flags = 0;
    KeyId key_id{};   // all-zero unless the QKD layer is present
    Bytes kem_ct;     // empty unless the Kyber layer is present
    Nonce nonce_outer{};
    Nonce nonce_inner{};
    Bytes body;

    bool has_qkd_layer() const { return flags & kFlagQkd; }
    bool has_kyber_layer() const { return flags & kFlagKyber; }
    bool operator==(const QgpEnvelope&) const = default;
};

enum class FrameError : std::uint8_t {
    BadMagic,
    UnsupportedVersion,
    UnsupportedSuite,
    Malformed,  // truncation, trailing bytes, or field inconsistency
};

Bytes encode_envelope(const QgpEnvelope& e);
/// Rejects trailing garbage and every field inconsistency.
std::variant<QgpEnvelope, FrameError> decode_envelope(ByteView bytes);
/// All envelope bytes preceding the body; the AEAD associated data.
Bytes header_bytes(const QgpEnvelope& e);

enum class OpenError : std::uint8_t {
    BadMagic,
    UnsupportedVersion,
    UnsupportedSuite,
    UnknownKeyId,
    ReplayDetected,
    OuterAuthFail,
    InnerAuthFail,
    DecompressError,
    SignatureInvalid,
};

std::string open_error_name(OpenError error);

struct OpenOutcome {
    std::optional<Bytes> message;                    // set exactly on success
    OpenError error = OpenError::BadMagic;           // meaningful otherwise

    bool ok() const { return message.has_value(); }
};

/// Draws nonces and KEM encapsulation seeds during seal.
class NonceSource {
public:
    virtual ~NonceSource() = default;
    virtual void fill(std::uint8_t* out, std::size_t len) = 0;
};

/// Deterministic SHAKE256 stream; a fixed seed pins the whole envelope.
class XofNonceSource final : public NonceSource {
public:
    explicit XofNonceSource(ByteView seed);
    void fill(std::uint8_t* out, std::size_t len) override;

private:
    KeccakSponge sponge_;
};

/// OS randomness for non-reproducible operation.
class SystemNonceSource final : public NonceSource {
public:
    void fill(std::uint8_t* out, std::size_t len) override;
};

struct SessionKeyRef {
    KeyId id;
    Bytes key;  // packed key bytes as served by the key service
};

struct SealContext {
    Bytes signer_secret_key;  // Dilithium3
    HashAlgorithm hash_algorithm = HashAlgorithm::Sha3_256;
    std::optional<SessionKeyRef> session_key;     // enables the QKD layer
    std::optional<Bytes> recipient_kem_public;    // enables the Kyber layer
};

/// Hash, sign the hash, prepend the signature, compress, encrypt under the
/// one-time session key, then wrap in the Kyber hybrid layer; at least one
/// encryption layer is required. Throws std::invalid_argument on context
/// misuse (missing layer material, short session key, oversized message).
Bytes seal(ByteView message, const SealContext& ctx, NonceSource& nonce_source);

/// One-time-use tracking for envelope identities: key_id when the QKD layer
/// is present, nonce_outer otherwise. check/record are individually
/// linearizable.
class ReplayRegistry {
public:
    bool seen(const QgpEnvelope& e) const;
    void record(const QgpEnvelope& e);

    /// The stable identity open() tracks, for persistence across processes.
    static Bytes token_of(const QgpEnvelope& e);
    void insert_token(Bytes token);

private:
    mutable std::mutex mutex_;
    std::set<Bytes> tokens_;
};

using KeyLookup = std::function<std::optional<Bytes>(const KeyId&)>;

/// Inverse pipeline over arbitrary bytes. Error precedence: framing, replay,
/// unknown key, outer auth, inner auth, decompression, signature. Every
/// failure is a value; only a wrong-sized verify key throws.
OpenOutcome open(ByteView envelope_bytes, ByteView kem_secret, const KeyLookup& key_lookup,
                 ByteView verify_key, ReplayRegistry& replay_registry);

}  // namespace qgp::codec
