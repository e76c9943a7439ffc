#include <doctest.h>

#include <fstream>
#include <random>

#include "qgp/aead.hpp"
#include "qgp/compress.hpp"
#include "qgp/dilithium3.hpp"
#include "qgp/envelope.hpp"
#include "qgp/kyber768.hpp"
#include "qgp/sha3.hpp"

using namespace qgp;
using namespace qgp::codec;

namespace {

struct Fixture {
    dilithium3::SigKeyPair signer;
    kyber768::KemKeyPair recipient;
    SessionKeyRef session;
    Bytes session_key_bytes;

    Fixture() {
        signer = dilithium3::sig_keygen(Bytes(32, 0x11));
        recipient = kyber768::kem_keygen(Bytes(64, 0x22));
        session.id.fill(0x33);
        session.key = Bytes(32, 0x44);
        session_key_bytes = session.key;
    }

    SealContext ctx(bool qkd, bool kyber, HashAlgorithm alg = HashAlgorithm::Sha3_256) const {
        SealContext c;
        c.signer_secret_key = signer.secret_key;
        c.hash_algorithm = alg;
        if (qkd) c.session_key = session;
        if (kyber) c.recipient_kem_public = recipient.public_key;
        return c;
    }

    KeyLookup lookup() const {
        auto id = session.id;
        auto key = session.key;
        return [id, key](const KeyId& requested) -> std::optional<Bytes> {
            if (requested == id) return key;
            return std::nullopt;
        };
    }

    OpenOutcome open_with(ByteView bytes, ReplayRegistry& reg) const {
        return open(bytes, recipient.secret_key, lookup(), signer.public_key, reg);
    }
};

Bytes random_message(std::mt19937_64& rng, std::size_t max_len) {
    Bytes msg(rng() % (max_len + 1));
    for (auto& b : msg) b = static_cast<std::uint8_t>(rng());
    return msg;
}

}  // namespace

TEST_CASE("roundtrip across all three layer combinations") {
    Fixture fx;
    std::mt19937_64 rng(1);
    const bool layer_combos[3][2] = {{true, false}, {false, true}, {true, true}};
    for (int combo = 0; combo < 3; ++combo) {
        for (int trial = 0; trial < 40; ++trial) {
            Bytes msg = random_message(rng, 4096);
            XofNonceSource nonces(Bytes{static_cast<std::uint8_t>(combo),
                                        static_cast<std::uint8_t>(trial)});
            Bytes env = seal(msg, fx.ctx(layer_combos[combo][0], layer_combos[combo][1]), nonces);
            ReplayRegistry reg;
            auto outcome = fx.open_with(env, reg);
            REQUIRE(outcome.ok());
            CHECK(*outcome.message == msg);
        }
    }
}

TEST_CASE("empty message seals and opens") {
    Fixture fx;
    XofNonceSource nonces(to_bytes("empty"));
    Bytes env = seal({}, fx.ctx(true, true), nonces);
    ReplayRegistry reg;
    auto outcome = fx.open_with(env, reg);
    REQUIRE(outcome.ok());
    CHECK(outcome.message->empty());
}

TEST_CASE("sha2 suite roundtrip") {
    Fixture fx;
    XofNonceSource nonces(to_bytes("sha2"));
    Bytes msg = to_bytes("suite two");
    Bytes env = seal(msg, fx.ctx(true, false, HashAlgorithm::Sha2_256), nonces);
    auto decoded = decode_envelope(env);
    REQUIRE(std::holds_alternative<QgpEnvelope>(decoded));
    CHECK(std::get<QgpEnvelope>(decoded).suite == kSuiteSha2);
    ReplayRegistry reg;
    auto outcome = fx.open_with(env, reg);
    REQUIRE(outcome.ok());
    CHECK(*outcome.message == msg);
}

TEST_CASE("golden envelope is byte-stable") {
    Fixture fx;
    XofNonceSource nonces(to_bytes("golden-hello"));
    Bytes env = seal(to_bytes("hello"), fx.ctx(true, true), nonces);

    XofNonceSource nonces2(to_bytes("golden-hello"));
    Bytes env2 = seal(to_bytes("hello"), fx.ctx(true, true), nonces2);
    CHECK(env == env2);

    std::ifstream in(std::string(QGP_KAT_DIR) + "/../golden/envelope_hello.bin",
                     std::ios::binary);
    REQUIRE(in.good());
    Bytes frozen((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(env == frozen);
}

TEST_CASE("seal context misuse throws") {
    Fixture fx;
    XofNonceSource nonces(to_bytes("usage"));
    SealContext none = fx.ctx(false, false);
    CHECK_THROWS_AS(seal(to_bytes("x"), none, nonces), std::invalid_argument);

    SealContext short_key = fx.ctx(true, false);
    short_key.session_key->key = Bytes(31, 1);  // 248 bits
    CHECK_THROWS_AS(seal(to_bytes("x"), short_key, nonces), std::invalid_argument);

    SealContext bad_signer = fx.ctx(true, false);
    bad_signer.signer_secret_key.pop_back();
    CHECK_THROWS_AS(seal(to_bytes("x"), bad_signer, nonces), std::invalid_argument);

    SealContext bad_pk = fx.ctx(false, true);
    bad_pk.recipient_kem_public->pop_back();
    CHECK_THROWS_AS(seal(to_bytes("x"), bad_pk, nonces), std::invalid_argument);
}

TEST_CASE("encode/decode bijection on random valid envelopes") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        QgpEnvelope e;
        e.suite = (rng() & 1) ? kSuiteSha3 : kSuiteSha2;
        int combo = static_cast<int>(rng() % 3);
        e.flags = combo == 0 ? kFlagQkd : combo == 1 ? kFlagKyber
                                                     : (kFlagQkd | kFlagKyber);
        if (e.has_qkd_layer()) {
            for (auto& b : e.key_id) b = static_cast<std::uint8_t>(rng());
            e.key_id[0] |= 1;  // never all-zero
        }
        if (e.has_kyber_layer()) {
            e.kem_ct.resize(kyber768::kCiphertextBytes);
            for (auto& b : e.kem_ct) b = static_cast<std::uint8_t>(rng());
        }
        for (auto& b : e.nonce_outer) b = static_cast<std::uint8_t>(rng());
        for (auto& b : e.nonce_inner) b = static_cast<std::uint8_t>(rng());
        e.body.resize(rng() % 600);
        for (auto& b : e.body) b = static_cast<std::uint8_t>(rng());

        auto decoded = decode_envelope(encode_envelope(e));
        REQUIRE(std::holds_alternative<QgpEnvelope>(decoded));
        CHECK(std::get<QgpEnvelope>(decoded) == e);
    }
}

TEST_CASE("framing rejections") {
    CHECK(std::get<FrameError>(decode_envelope(Bytes{1, 2, 3})) == FrameError::BadMagic);
    CHECK(std::get<FrameError>(decode_envelope(to_bytes("QGP1"))) == FrameError::Malformed);

    Fixture fx;
    XofNonceSource nonces(to_bytes("framing"));
    Bytes env = seal(to_bytes("msg"), fx.ctx(true, false), nonces);

    // body_len larger than the remaining bytes
    Bytes truncated(env.begin(), env.end() - 3);
    CHECK(std::get<FrameError>(decode_envelope(truncated)) == FrameError::Malformed);

    // trailing garbage
    Bytes trailing = env;
    trailing.push_back(0xCC);
    CHECK(std::get<FrameError>(decode_envelope(trailing)) == FrameError::Malformed);

    Bytes bad_version = env;
    bad_version[4] = 0x02;
    CHECK(std::get<FrameError>(decode_envelope(bad_version)) == FrameError::UnsupportedVersion);

    Bytes bad_suite = env;
    bad_suite[5] = 0x07;
    CHECK(std::get<FrameError>(decode_envelope(bad_suite)) == FrameError::UnsupportedSuite);

    Bytes no_layers = env;
    no_layers[6] = 0x00;
    CHECK(std::get<FrameError>(decode_envelope(no_layers)) == FrameError::Malformed);
}

TEST_CASE("error taxonomy and precedence") {
    Fixture fx;

    SUBCASE("replay detected on the second open") {
        XofNonceSource nonces(to_bytes("replay"));
        Bytes env = seal(to_bytes("once"), fx.ctx(true, true), nonces);
        ReplayRegistry reg;
        CHECK(fx.open_with(env, reg).ok());
        auto second = fx.open_with(env, reg);
        CHECK(!second.ok());
        CHECK(second.error == OpenError::ReplayDetected);
    }

    SUBCASE("kyber-only replay keys on nonce_outer") {
        XofNonceSource nonces(to_bytes("replay-kyber"));
        Bytes env = seal(to_bytes("once"), fx.ctx(false, true), nonces);
        ReplayRegistry reg;
        CHECK(fx.open_with(env, reg).ok());
        auto second = fx.open_with(env, reg);
        CHECK(second.error == OpenError::ReplayDetected);
    }

    SUBCASE("unknown key id") {
        XofNonceSource nonces(to_bytes("unknown"));
        Bytes env = seal(to_bytes("m"), fx.ctx(true, false), nonces);
        ReplayRegistry reg;
        auto outcome = open(env, {}, [](const KeyId&) { return std::nullopt; },
                            fx.signer.public_key, reg);
        CHECK(outcome.error == OpenError::UnknownKeyId);
    }

    SUBCASE("corrupted kem_ct fails outer before the inner layer is touched") {
        XofNonceSource nonces(to_bytes("outer"));
        Bytes env = seal(to_bytes("m"), fx.ctx(true, true), nonces);
        auto decoded = std::get<QgpEnvelope>(decode_envelope(env));
        decoded.kem_ct[100] ^= 0xFF;
        decoded.nonce_inner[0] ^= 0xFF;  // also poison the inner layer
        ReplayRegistry reg;
        int lookups = 0;
        auto counting_lookup = [&](const KeyId& id) -> std::optional<Bytes> {
            ++lookups;
            if (id == fx.session.id) return fx.session.key;
            return std::nullopt;
        };
        auto outcome = open(encode_envelope(decoded), fx.recipient.secret_key, counting_lookup,
                            fx.signer.public_key, reg);
        CHECK(outcome.error == OpenError::OuterAuthFail);
        CHECK(lookups == 1);  // key id resolved, but the inner layer never ran
    }

    SUBCASE("wrong session key fails the inner layer") {
        XofNonceSource nonces(to_bytes("inner"));
        Bytes env = seal(to_bytes("m"), fx.ctx(true, true), nonces);
        ReplayRegistry reg;
        auto wrong_lookup = [&](const KeyId&) -> std::optional<Bytes> {
            return Bytes(32, 0x99);
        };
        auto outcome =
            open(env, fx.recipient.secret_key, wrong_lookup, fx.signer.public_key, reg);
        CHECK(outcome.error == OpenError::InnerAuthFail);
    }

    SUBCASE("valid layers around a non-deflate payload decompress-fail") {
        QgpEnvelope e;
        e.flags = kFlagQkd;
        e.key_id = fx.session.id;
        e.nonce_inner.fill(7);
        e.nonce_outer.fill(8);
        Bytes not_deflate = to_bytes("\xff\xff\xff this is not a deflate stream");
        e.body.resize(not_deflate.size() + kAeadTagLen);
        Bytes header = header_bytes(e);
        Bytes key_input = fx.session.key;
        auto tag = to_bytes("QGP-inner");
        key_input.insert(key_input.end(), tag.begin(), tag.end());
        AeadKey inner_key{};
        auto digest = sha3_256(key_input);
        std::copy(digest.begin(), digest.end(), inner_key.begin());
        e.body = aead_seal(inner_key, e.nonce_inner, header, not_deflate);

        ReplayRegistry reg;
        auto outcome = fx.open_with(encode_envelope(e), reg);
        CHECK(outcome.error == OpenError::DecompressError);
    }

    SUBCASE("signature over a different message is rejected") {
        // reuse the signature bytes of one message around another
        Bytes original = to_bytes("pay alice 10");
        Bytes forged = to_bytes("pay eve 9999");
        Digest d = hash(original, HashAlgorithm::Sha3_256);
        Bytes signature = dilithium3::sign(fx.signer.secret_key, d.view());

        Bytes plain;
        put_u32_be(plain, static_cast<std::uint32_t>(signature.size()));
        plain.insert(plain.end(), signature.begin(), signature.end());
        plain.insert(plain.end(), forged.begin(), forged.end());
        Bytes zipped = deflate_compress(plain);

        QgpEnvelope e;
        e.flags = kFlagQkd;
        e.key_id = fx.session.id;
        e.nonce_inner.fill(1);
        e.nonce_outer.fill(2);
        e.body.resize(zipped.size() + kAeadTagLen);
        Bytes header = header_bytes(e);
        Bytes key_input = fx.session.key;
        auto tag = to_bytes("QGP-inner");
        key_input.insert(key_input.end(), tag.begin(), tag.end());
        AeadKey inner_key{};
        auto digest = sha3_256(key_input);
        std::copy(digest.begin(), digest.end(), inner_key.begin());
        e.body = aead_seal(inner_key, e.nonce_inner, header, zipped);

        ReplayRegistry reg;
        auto outcome = fx.open_with(encode_envelope(e), reg);
        CHECK(outcome.error == OpenError::SignatureInvalid);
    }

    SUBCASE("bad verify key length throws, nothing else does") {
        XofNonceSource nonces(to_bytes("verify"));
        Bytes env = seal(to_bytes("m"), fx.ctx(true, false), nonces);
        ReplayRegistry reg;
        CHECK_THROWS_AS(open(env, {}, fx.lookup(), Bytes(10), reg), std::invalid_argument);
    }
}

TEST_CASE("exhaustive single-byte mutation never yields a wrong message") {
    Fixture fx;
    Bytes msg = to_bytes("tamper totality target");

    auto sweep = [&](bool qkd, bool kyber, const char* label) {
        XofNonceSource nonces(to_bytes(label));
        Bytes env = seal(msg, fx.ctx(qkd, kyber), nonces);
        std::size_t wrong = 0, delivered = 0;
        for (std::size_t pos = 0; pos < env.size(); ++pos) {
            for (std::uint8_t flip : {std::uint8_t{0x01}, std::uint8_t{0xFF}}) {
                Bytes mutant = env;
                mutant[pos] ^= flip;
                ReplayRegistry reg;
                auto outcome = fx.open_with(mutant, reg);
                if (outcome.ok()) {
                    ++delivered;
                    if (*outcome.message != msg) ++wrong;
                }
            }
        }
        CHECK(wrong == 0);
        CHECK(delivered == 0);
    };

    sweep(true, false, "sweep-qkd");
    sweep(true, true, "sweep-both");
}
