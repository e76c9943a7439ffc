#include <doctest.h>

#include <random>

#include "kat_file.hpp"
#include "qgp/dilithium3.hpp"
#include "qgp/drbg.hpp"

using namespace qgp;
namespace dl = qgp::dilithium3;

TEST_CASE("dilithium3 known-answer tests, all 100 vectors byte-exact") {
    auto records = kat::load(std::string(QGP_KAT_DIR) + "/dilithium3.rsp");
    REQUIRE(records.size() == 100);
    for (const auto& rec : records) {
        Bytes seed = kat::hex(rec, "seed");
        Bytes msg = kat::hex(rec, "msg");
        REQUIRE(msg.size() == static_cast<std::size_t>(std::stoul(rec.at("mlen"))));

        NistCtrDrbg drbg(seed);
        Bytes zeta = drbg.generate(32);
        auto kp = dl::sig_keygen(zeta);
        CHECK(kp.public_key == kat::hex(rec, "pk"));
        CHECK(kp.secret_key == kat::hex(rec, "sk"));

        Bytes sig = dl::sign(kp.secret_key, msg);
        Bytes sm = concat(sig, msg);
        CHECK(sm == kat::hex(rec, "sm"));
        REQUIRE(sm.size() == static_cast<std::size_t>(std::stoul(rec.at("smlen"))));

        CHECK(dl::verify(kp.public_key, msg, sig));
    }
}

TEST_CASE("sign/verify roundtrip for 1000 random messages") {
    std::mt19937_64 rng(77);
    Bytes seed(dl::kKeygenSeedBytes);
    for (auto& b : seed) b = static_cast<std::uint8_t>(rng());
    auto kp = dl::sig_keygen(seed);
    for (int i = 0; i < 1000; ++i) {
        Bytes msg(rng() % 200);
        for (auto& b : msg) b = static_cast<std::uint8_t>(rng());
        Bytes sig = dl::sign(kp.secret_key, msg);
        CHECK(dl::verify(kp.public_key, msg, sig));
    }
}

TEST_CASE("single-bit flips of message or signature always reject") {
    std::mt19937_64 rng(78);
    Bytes seed(dl::kKeygenSeedBytes);
    for (auto& b : seed) b = static_cast<std::uint8_t>(rng());
    auto kp = dl::sig_keygen(seed);

    int trials = 0;
    while (trials < 1000) {
        Bytes msg(8 + rng() % 32);
        for (auto& b : msg) b = static_cast<std::uint8_t>(rng());
        Bytes sig = dl::sign(kp.secret_key, msg);

        Bytes bad_msg = msg;
        std::size_t mbit = rng() % (bad_msg.size() * 8);
        bad_msg[mbit / 8] ^= static_cast<std::uint8_t>(1u << (mbit % 8));
        CHECK(!dl::verify(kp.public_key, bad_msg, sig));
        ++trials;

        Bytes bad_sig = sig;
        std::size_t sbit = rng() % (bad_sig.size() * 8);
        bad_sig[sbit / 8] ^= static_cast<std::uint8_t>(1u << (sbit % 8));
        CHECK(!dl::verify(kp.public_key, msg, bad_sig));
        ++trials;
    }
}

TEST_CASE("deterministic keygen and distinct seeds") {
    Bytes seed_a(dl::kKeygenSeedBytes, 0x11);
    Bytes seed_b(dl::kKeygenSeedBytes, 0x12);
    auto kp1 = dl::sig_keygen(seed_a);
    auto kp2 = dl::sig_keygen(seed_a);
    CHECK(kp1.public_key == kp2.public_key);
    CHECK(kp1.secret_key == kp2.secret_key);
    CHECK(dl::sig_keygen(seed_b).public_key != kp1.public_key);
}

TEST_CASE("malformed inputs") {
    CHECK_THROWS_AS(dl::sig_keygen(Bytes(31)), std::invalid_argument);
    CHECK_THROWS_AS(dl::sign(Bytes(100), Bytes{}), std::invalid_argument);
    auto kp = dl::sig_keygen(Bytes(32, 5));
    CHECK_THROWS_AS(dl::verify(Bytes(3), Bytes{}, Bytes(dl::kSignatureBytes)),
                    std::invalid_argument);
    // wrong-length signatures are invalid, not errors
    CHECK(!dl::verify(kp.public_key, Bytes{}, Bytes{}));
    CHECK(!dl::verify(kp.public_key, Bytes{}, Bytes(100, 0)));
    CHECK(!dl::verify(kp.public_key, Bytes{}, Bytes(dl::kSignatureBytes, 0)));
}
