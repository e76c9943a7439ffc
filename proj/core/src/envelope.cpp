#include "qgp/envelope.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "qgp/aead.hpp"
#include "qgp/compress.hpp"
#include "qgp/dilithium3.hpp"
#include "qgp/kyber768.hpp"

namespace qgp::codec {

namespace {

constexpr std::size_t kFixedHeaderBytes = 4 + 1 + 1 + 1 + 1 + 16 + 4;
constexpr std::size_t kTailBytes = 12 + 12 + 4;

bool suite_known(std::uint8_t suite) { return suite == kSuiteSha3 || suite == kSuiteSha2; }

HashAlgorithm suite_hash(std::uint8_t suite) {
    return suite == kSuiteSha2 ? HashAlgorithm::Sha2_256 : HashAlgorithm::Sha3_256;
}

AeadKey derive_layer_key(ByteView secret, std::string_view label) {
    Bytes input(secret.begin(), secret.end());
    Bytes tag = to_bytes(label);
    input.insert(input.end(), tag.begin(), tag.end());
    auto digest = sha3_256(input);
    AeadKey key{};
    std::copy(digest.begin(), digest.end(), key.begin());
    return key;
}

bool key_id_is_zero(const KeyId& id) {
    return std::all_of(id.begin(), id.end(), [](std::uint8_t b) { return b == 0; });
}

}  // namespace

Bytes encode_envelope(const QgpEnvelope& e) {
    Bytes out = header_bytes(e);
    out.insert(out.end(), e.body.begin(), e.body.end());
    return out;
}

Bytes header_bytes(const QgpEnvelope& e) {
    Bytes out;
    out.reserve(kFixedHeaderBytes + e.kem_ct.size() + kTailBytes);
    out.insert(out.end(), kMagic.begin(), kMagic.end());
    out.push_back(e.version);
    out.push_back(e.suite);
    out.push_back(e.flags);
    out.push_back(0x00);  // reserved
    out.insert(out.end(), e.key_id.begin(), e.key_id.end());
    put_u32_be(out, static_cast<std::uint32_t>(e.kem_ct.size()));
    out.insert(out.end(), e.kem_ct.begin(), e.kem_ct.end());
    out.insert(out.end(), e.nonce_outer.begin(), e.nonce_outer.end());
    out.insert(out.end(), e.nonce_inner.begin(), e.nonce_inner.end());
    put_u32_be(out, static_cast<std::uint32_t>(e.body.size()));
    return out;
}

std::variant<QgpEnvelope, FrameError> decode_envelope(ByteView bytes) {
    if (bytes.size() < 4 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
        return FrameError::BadMagic;
    }
    if (bytes.size() < kFixedHeaderBytes) return FrameError::Malformed;

    QgpEnvelope e;
    std::size_t pos = 4;
    e.version = bytes[pos++];
    if (e.version != kVersion) return FrameError::UnsupportedVersion;
    e.suite = bytes[pos++];
    if (!suite_known(e.suite)) return FrameError::UnsupportedSuite;
    e.flags = bytes[pos++];
    if (e.flags == 0 || (e.flags & ~(kFlagQkd | kFlagKyber)) != 0) return FrameError::Malformed;
    if (bytes[pos++] != 0x00) return FrameError::Malformed;  // reserved

    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), e.key_id.size(),
                e.key_id.begin());
    pos += e.key_id.size();
    if (e.has_qkd_layer() == key_id_is_zero(e.key_id)) return FrameError::Malformed;

    std::uint32_t kem_ct_len = get_u32_be(bytes.data() + pos);
    pos += 4;
    if (e.has_kyber_layer()) {
        if (kem_ct_len != kyber768::kCiphertextBytes) return FrameError::Malformed;
    } else if (kem_ct_len != 0) {
        return FrameError::Malformed;
    }
    if (bytes.size() < pos + kem_ct_len + kTailBytes) return FrameError::Malformed;
    e.kem_ct.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                    bytes.begin() + static_cast<std::ptrdiff_t>(pos + kem_ct_len));
    pos += kem_ct_len;

    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), e.nonce_outer.size(),
                e.nonce_outer.begin());
    pos += e.nonce_outer.size();
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), e.nonce_inner.size(),
                e.nonce_inner.begin());
    pos += e.nonce_inner.size();

    std::uint32_t body_len = get_u32_be(bytes.data() + pos);
    pos += 4;
    if (bytes.size() - pos != body_len) return FrameError::Malformed;  // short or trailing bytes
    e.body.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
    return e;
}

std::string open_error_name(OpenError error) {
    switch (error) {
        case OpenError::BadMagic: return "BadMagic";
        case OpenError::UnsupportedVersion: return "UnsupportedVersion";
        case OpenError::UnsupportedSuite: return "UnsupportedSuite";
        case OpenError::UnknownKeyId: return "UnknownKeyId";
        case OpenError::ReplayDetected: return "ReplayDetected";
        case OpenError::OuterAuthFail: return "OuterAuthFail";
        case OpenError::InnerAuthFail: return "InnerAuthFail";
        case OpenError::DecompressError: return "DecompressError";
        case OpenError::SignatureInvalid: return "SignatureInvalid";
    }
    return "Unknown";
}

XofNonceSource::XofNonceSource(ByteView seed) : sponge_(shake256_sponge()) {
    sponge_.absorb(to_bytes("QGP-nonce-source"));
    sponge_.absorb(seed);
}

void XofNonceSource::fill(std::uint8_t* out, std::size_t len) { sponge_.squeeze(out, len); }

void SystemNonceSource::fill(std::uint8_t* out, std::size_t len) {
    if (RAND_bytes(out, static_cast<int>(len)) != 1) {
        throw std::runtime_error("system randomness unavailable");
    }
}

Bytes seal(ByteView message, const SealContext& ctx, NonceSource& nonce_source) {
    const bool qkd_layer = ctx.session_key.has_value();
    const bool kyber_layer = ctx.recipient_kem_public.has_value();
    if (!qkd_layer && !kyber_layer) {
        throw std::invalid_argument("seal: at least one encryption layer is required");
    }
    if (message.size() >= kMaxMessageBytes) {
        throw std::invalid_argument("seal: message too large");
    }
    if (ctx.signer_secret_key.size() != dilithium3::kSecretKeyBytes) {
        throw std::invalid_argument("seal: bad signer key length");
    }
    if (qkd_layer && ctx.session_key->key.size() < 32) {
        throw std::invalid_argument("seal: session key shorter than 256 bits");
    }
    if (kyber_layer && ctx.recipient_kem_public->size() != kyber768::kPublicKeyBytes) {
        throw std::invalid_argument("seal: bad recipient KEM public key length");
    }

    QgpEnvelope e;
    e.suite = ctx.hash_algorithm == HashAlgorithm::Sha2_256 ? kSuiteSha2 : kSuiteSha3;
    e.flags = static_cast<std::uint8_t>((qkd_layer ? kFlagQkd : 0) | (kyber_layer ? kFlagKyber : 0));
    if (qkd_layer) e.key_id = ctx.session_key->id;

    // sign the hash, prepend the signature, compress both together
    Digest digest = hash(message, ctx.hash_algorithm);
    Bytes signature = dilithium3::sign(ctx.signer_secret_key, digest.view());
    Bytes plain;
    plain.reserve(4 + signature.size() + message.size());
    put_u32_be(plain, static_cast<std::uint32_t>(signature.size()));
    plain.insert(plain.end(), signature.begin(), signature.end());
    plain.insert(plain.end(), message.begin(), message.end());
    Bytes zipped = deflate_compress(plain);

    // nonces in header order, then the encapsulation seed
    nonce_source.fill(e.nonce_outer.data(), e.nonce_outer.size());
    nonce_source.fill(e.nonce_inner.data(), e.nonce_inner.size());

    AeadKey outer_key{};
    if (kyber_layer) {
        Bytes encaps_seed(kyber768::kEncapsSeedBytes);
        nonce_source.fill(encaps_seed.data(), encaps_seed.size());
        auto enc = kyber768::encaps(*ctx.recipient_kem_public, encaps_seed);
        e.kem_ct = std::move(enc.ciphertext);
        outer_key = derive_layer_key(
            ByteView(enc.shared_secret.data(), enc.shared_secret.size()), "QGP1-outer");
    }

    // body_len is known up front, so the full header can serve as AD for
    // both layers
    std::size_t inner_len = zipped.size() + (qkd_layer ? kAeadTagLen : 0);
    std::size_t body_len = inner_len + (kyber_layer ? kAeadTagLen : 0);
    e.body.resize(body_len);  // placeholder for header_bytes()
    Bytes header = header_bytes(e);

    Bytes inner = std::move(zipped);
    if (qkd_layer) {
        AeadKey inner_key = derive_layer_key(ctx.session_key->key, "QGP-inner");
        inner = aead_seal(inner_key, e.nonce_inner, header, inner);
    }
    e.body = kyber_layer ? aead_seal(outer_key, e.nonce_outer, header, inner) : std::move(inner);
    return encode_envelope(e);
}

Bytes ReplayRegistry::token_of(const QgpEnvelope& e) {
    Bytes t;
    t.reserve(1 + e.key_id.size());
    if (e.has_qkd_layer()) {
        t.push_back(0x00);
        for (std::uint8_t b : e.key_id) t.push_back(b);
    } else {
        t.push_back(0x01);
        for (std::uint8_t b : e.nonce_outer) t.push_back(b);
    }
    return t;
}

bool ReplayRegistry::seen(const QgpEnvelope& e) const {
    std::lock_guard lock(mutex_);
    return tokens_.contains(token_of(e));
}

void ReplayRegistry::record(const QgpEnvelope& e) {
    std::lock_guard lock(mutex_);
    tokens_.insert(token_of(e));
}

void ReplayRegistry::insert_token(Bytes token) {
    std::lock_guard lock(mutex_);
    tokens_.insert(std::move(token));
}

OpenOutcome open(ByteView envelope_bytes, ByteView kem_secret, const KeyLookup& key_lookup,
                 ByteView verify_key, ReplayRegistry& replay_registry) {
    if (verify_key.size() != dilithium3::kPublicKeyBytes) {
        throw std::invalid_argument("open: bad verify key length");
    }

    OpenOutcome outcome;
    auto decoded = decode_envelope(envelope_bytes);
    if (std::holds_alternative<FrameError>(decoded)) {
        switch (std::get<FrameError>(decoded)) {
            case FrameError::UnsupportedVersion:
                outcome.error = OpenError::UnsupportedVersion;
                break;
            case FrameError::UnsupportedSuite:
                outcome.error = OpenError::UnsupportedSuite;
                break;
            case FrameError::BadMagic:
            case FrameError::Malformed:
                outcome.error = OpenError::BadMagic;
                break;
        }
        return outcome;
    }
    const QgpEnvelope& e = std::get<QgpEnvelope>(decoded);

    if (replay_registry.seen(e)) {
        outcome.error = OpenError::ReplayDetected;
        return outcome;
    }

    std::optional<Bytes> session_key;
    if (e.has_qkd_layer()) {
        session_key = key_lookup ? key_lookup(e.key_id) : std::nullopt;
        if (!session_key.has_value()) {
            outcome.error = OpenError::UnknownKeyId;
            return outcome;
        }
    }

    Bytes header = header_bytes(e);

    Bytes inner;
    if (e.has_kyber_layer()) {
        if (kem_secret.size() != kyber768::kSecretKeyBytes) {
            outcome.error = OpenError::OuterAuthFail;  // no way to peel the layer
            return outcome;
        }
        auto ss = kyber768::decaps(kem_secret, e.kem_ct);
        AeadKey outer_key = derive_layer_key(ByteView(ss.data(), ss.size()), "QGP1-outer");
        auto opened = aead_open(outer_key, e.nonce_outer, header, e.body);
        if (!opened.has_value()) {
            outcome.error = OpenError::OuterAuthFail;
            return outcome;
        }
        inner = std::move(*opened);
    } else {
        inner.assign(e.body.begin(), e.body.end());
    }

    Bytes zipped;
    if (e.has_qkd_layer()) {
        AeadKey inner_key = derive_layer_key(*session_key, "QGP-inner");
        auto opened = aead_open(inner_key, e.nonce_inner, header, inner);
        if (!opened.has_value()) {
            outcome.error = OpenError::InnerAuthFail;
            return outcome;
        }
        zipped = std::move(*opened);
    } else {
        zipped = std::move(inner);
    }

    auto plain = deflate_decompress(zipped);
    if (!plain.has_value()) {
        outcome.error = OpenError::DecompressError;
        return outcome;
    }

    if (plain->size() < 4) {
        outcome.error = OpenError::SignatureInvalid;
        return outcome;
    }
    std::uint32_t sig_len = get_u32_be(plain->data());
    if (plain->size() - 4 < sig_len) {
        outcome.error = OpenError::SignatureInvalid;
        return outcome;
    }
    ByteView signature(plain->data() + 4, sig_len);
    ByteView message(plain->data() + 4 + sig_len, plain->size() - 4 - sig_len);

    Digest digest = hash(message, suite_hash(e.suite));
    if (!dilithium3::verify(verify_key, digest.view(), signature)) {
        outcome.error = OpenError::SignatureInvalid;
        return outcome;
    }

    replay_registry.record(e);
    outcome.message = Bytes(message.begin(), message.end());
    return outcome;
}

}  // namespace qgp::codec
