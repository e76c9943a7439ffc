#include "qgp/kyber768.hpp"

#include <cstring>
#include <stdexcept>

#include "qgp/sha3.hpp"

namespace qgp::kyber768 {

namespace {

constexpr int kN = 256;
constexpr int kK = 3;
constexpr int kQ = 3329;
constexpr int kEta1 = 2;
constexpr int kEta2 = 2;
constexpr int kDu = 10;
constexpr int kDv = 4;
constexpr int kSymBytes = 32;
constexpr int kPolyBytes = 384;
constexpr int kPolyVecBytes = kK * kPolyBytes;
constexpr int kPolyCompressedBytes = 128;       // dv = 4
constexpr int kPolyVecCompressedBytes = 960;    // du = 10
constexpr std::size_t kIndcpaSecretBytes = kPolyVecBytes;
constexpr std::size_t kIndcpaPublicBytes = kPolyVecBytes + kSymBytes;

// q^-1 mod 2^16 and 2^16 mod q, for Montgomery arithmetic.
constexpr std::int16_t kQinv = -3327;
constexpr std::int16_t kMontR2 = 1353;  // 2^32 mod q

struct Poly {
    std::array<std::int16_t, kN> c{};
};
using PolyVec = std::array<Poly, kK>;

std::int16_t montgomery_reduce(std::int32_t a) {
    std::int16_t t = static_cast<std::int16_t>(a * kQinv);
    return static_cast<std::int16_t>((a - static_cast<std::int32_t>(t) * kQ) >> 16);
}

std::int16_t barrett_reduce(std::int16_t a) {
    constexpr std::int16_t v = ((1 << 26) + kQ / 2) / kQ;
    std::int16_t t = static_cast<std::int16_t>((static_cast<std::int32_t>(v) * a + (1 << 25)) >> 26);
    return static_cast<std::int16_t>(a - t * kQ);
}

std::int16_t fqmul(std::int16_t a, std::int16_t b) {
    return montgomery_reduce(static_cast<std::int32_t>(a) * b);
}

// zetas[i] = 17^bitrev7(i) * 2^16 mod+- q, the twiddle table of the
// negacyclic NTT over Z_q[X]/(X^256 + 1).
struct ZetaTable {
    std::array<std::int16_t, 128> z{};
    ZetaTable() {
        auto bitrev7 = [](int v) {
            int r = 0;
            for (int b = 0; b < 7; ++b) r = (r << 1) | ((v >> b) & 1);
            return r;
        };
        std::int32_t pow[128];
        pow[0] = 1;
        for (int i = 1; i < 128; ++i) pow[i] = (pow[i - 1] * 17) % kQ;
        for (int i = 0; i < 128; ++i) {
            std::int32_t v = (pow[bitrev7(i)] * 65536) % kQ;  // to Montgomery form
            if (v > kQ / 2) v -= kQ;
            z[static_cast<std::size_t>(i)] = static_cast<std::int16_t>(v);
        }
    }
};
const ZetaTable kZetas;

void poly_reduce(Poly& p);

void ntt(Poly& p) {
    auto& r = p.c;
    int k = 1;
    for (int len = 128; len >= 2; len >>= 1) {
        for (int start = 0; start < kN; start += 2 * len) {
            std::int16_t zeta = kZetas.z[static_cast<std::size_t>(k++)];
            for (int j = start; j < start + len; ++j) {
                std::int16_t t = fqmul(zeta, r[static_cast<std::size_t>(j + len)]);
                r[static_cast<std::size_t>(j + len)] = static_cast<std::int16_t>(r[static_cast<std::size_t>(j)] - t);
                r[static_cast<std::size_t>(j)] = static_cast<std::int16_t>(r[static_cast<std::size_t>(j)] + t);
            }
        }
    }
    poly_reduce(p);  // keep coefficients in the centered range serialization expects
}

void inv_ntt(Poly& p) {
    auto& r = p.c;
    constexpr std::int16_t f = 1441;  // 2^32 / 128 mod q
    int k = 127;
    for (int len = 2; len <= 128; len <<= 1) {
        for (int start = 0; start < kN; start += 2 * len) {
            std::int16_t zeta = kZetas.z[static_cast<std::size_t>(k--)];
            for (int j = start; j < start + len; ++j) {
                std::int16_t t = r[static_cast<std::size_t>(j)];
                r[static_cast<std::size_t>(j)] =
                    barrett_reduce(static_cast<std::int16_t>(t + r[static_cast<std::size_t>(j + len)]));
                r[static_cast<std::size_t>(j + len)] =
                    static_cast<std::int16_t>(r[static_cast<std::size_t>(j + len)] - t);
                r[static_cast<std::size_t>(j + len)] = fqmul(zeta, r[static_cast<std::size_t>(j + len)]);
            }
        }
    }
    for (auto& c : r) c = fqmul(c, f);
}

// Multiplication in Z_q[X]/(X^2 - zeta), the residue pairs of the NTT domain.
void basemul(std::int16_t r[2], const std::int16_t a[2], const std::int16_t b[2],
             std::int16_t zeta) {
    r[0] = fqmul(a[1], b[1]);
    r[0] = fqmul(r[0], zeta);
    r[0] = static_cast<std::int16_t>(r[0] + fqmul(a[0], b[0]));
    r[1] = fqmul(a[0], b[1]);
    r[1] = static_cast<std::int16_t>(r[1] + fqmul(a[1], b[0]));
}

void poly_basemul_montgomery(Poly& r, const Poly& a, const Poly& b) {
    for (std::size_t i = 0; i < kN / 4; ++i) {
        basemul(&r.c[4 * i], &a.c[4 * i], &b.c[4 * i], kZetas.z[64 + i]);
        basemul(&r.c[4 * i + 2], &a.c[4 * i + 2], &b.c[4 * i + 2],
                static_cast<std::int16_t>(-kZetas.z[64 + i]));
    }
}

void poly_tomont(Poly& p) {
    for (auto& c : p.c) c = montgomery_reduce(static_cast<std::int32_t>(c) * kMontR2);
}

void poly_reduce(Poly& p) {
    for (auto& c : p.c) c = barrett_reduce(c);
}

void poly_add(Poly& r, const Poly& a, const Poly& b) {
    for (std::size_t i = 0; i < kN; ++i) r.c[i] = static_cast<std::int16_t>(a.c[i] + b.c[i]);
}

void poly_sub(Poly& r, const Poly& a, const Poly& b) {
    for (std::size_t i = 0; i < kN; ++i) r.c[i] = static_cast<std::int16_t>(a.c[i] - b.c[i]);
}

// Accumulated pointwise product <a, b>, result in Montgomery-deficient form.
void polyvec_basemul_acc(Poly& r, const PolyVec& a, const PolyVec& b) {
    Poly t;
    poly_basemul_montgomery(r, a[0], b[0]);
    for (int i = 1; i < kK; ++i) {
        poly_basemul_montgomery(t, a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(i)]);
        poly_add(r, r, t);
    }
    poly_reduce(r);
}

std::uint16_t to_unsigned(std::int16_t a) {
    return static_cast<std::uint16_t>(a + ((a >> 15) & kQ));
}

void poly_tobytes(std::uint8_t out[kPolyBytes], const Poly& p) {
    for (std::size_t i = 0; i < kN / 2; ++i) {
        std::uint16_t t0 = to_unsigned(p.c[2 * i]);
        std::uint16_t t1 = to_unsigned(p.c[2 * i + 1]);
        out[3 * i + 0] = static_cast<std::uint8_t>(t0);
        out[3 * i + 1] = static_cast<std::uint8_t>((t0 >> 8) | (t1 << 4));
        out[3 * i + 2] = static_cast<std::uint8_t>(t1 >> 4);
    }
}

void poly_frombytes(Poly& p, const std::uint8_t in[kPolyBytes]) {
    for (std::size_t i = 0; i < kN / 2; ++i) {
        p.c[2 * i] = static_cast<std::int16_t>(
            (in[3 * i] | (static_cast<std::uint16_t>(in[3 * i + 1]) << 8)) & 0xFFF);
        p.c[2 * i + 1] = static_cast<std::int16_t>(
            ((in[3 * i + 1] >> 4) | (static_cast<std::uint16_t>(in[3 * i + 2]) << 4)) & 0xFFF);
    }
}

void poly_compress(std::uint8_t out[kPolyCompressedBytes], const Poly& p) {
    std::uint8_t t[8];
    for (std::size_t i = 0; i < kN / 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            std::uint16_t u = to_unsigned(p.c[8 * i + j]);
            t[j] = static_cast<std::uint8_t>(
                ((static_cast<std::uint32_t>(u) << kDv) + kQ / 2) / kQ & 15);
        }
        out[4 * i + 0] = static_cast<std::uint8_t>(t[0] | (t[1] << 4));
        out[4 * i + 1] = static_cast<std::uint8_t>(t[2] | (t[3] << 4));
        out[4 * i + 2] = static_cast<std::uint8_t>(t[4] | (t[5] << 4));
        out[4 * i + 3] = static_cast<std::uint8_t>(t[6] | (t[7] << 4));
    }
}

void poly_decompress(Poly& p, const std::uint8_t in[kPolyCompressedBytes]) {
    for (std::size_t i = 0; i < kN / 2; ++i) {
        p.c[2 * i] = static_cast<std::int16_t>(((in[i] & 15) * kQ + 8) >> 4);
        p.c[2 * i + 1] = static_cast<std::int16_t>(((in[i] >> 4) * kQ + 8) >> 4);
    }
}

void polyvec_compress(std::uint8_t out[kPolyVecCompressedBytes], const PolyVec& v) {
    std::uint16_t t[4];
    std::size_t pos = 0;
    for (const Poly& p : v) {
        for (std::size_t i = 0; i < kN / 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                std::uint16_t u = to_unsigned(p.c[4 * i + j]);
                t[j] = static_cast<std::uint16_t>(
                    ((static_cast<std::uint32_t>(u) << kDu) + kQ / 2) / kQ & 0x3ff);
            }
            out[pos + 0] = static_cast<std::uint8_t>(t[0]);
            out[pos + 1] = static_cast<std::uint8_t>((t[0] >> 8) | (t[1] << 2));
            out[pos + 2] = static_cast<std::uint8_t>((t[1] >> 6) | (t[2] << 4));
            out[pos + 3] = static_cast<std::uint8_t>((t[2] >> 4) | (t[3] << 6));
            out[pos + 4] = static_cast<std::uint8_t>(t[3] >> 2);
            pos += 5;
        }
    }
}

void polyvec_decompress(PolyVec& v, const std::uint8_t in[kPolyVecCompressedBytes]) {
    std::size_t pos = 0;
    for (Poly& p : v) {
        for (std::size_t i = 0; i < kN / 4; ++i) {
            std::uint16_t t[4];
            t[0] = static_cast<std::uint16_t>(in[pos] | (static_cast<std::uint16_t>(in[pos + 1]) << 8));
            t[1] = static_cast<std::uint16_t>((in[pos + 1] >> 2) | (static_cast<std::uint16_t>(in[pos + 2]) << 6));
            t[2] = static_cast<std::uint16_t>((in[pos + 2] >> 4) | (static_cast<std::uint16_t>(in[pos + 3]) << 4));
            t[3] = static_cast<std::uint16_t>((in[pos + 3] >> 6) | (static_cast<std::uint16_t>(in[pos + 4]) << 2));
            pos += 5;
            for (std::size_t j = 0; j < 4; ++j) {
                p.c[4 * i + j] = static_cast<std::int16_t>(
                    (static_cast<std::uint32_t>(t[j] & 0x3ff) * kQ + 512) >> 10);
            }
        }
    }
}

void polyvec_tobytes(std::uint8_t* out, const PolyVec& v) {
    for (int i = 0; i < kK; ++i) poly_tobytes(out + i * kPolyBytes, v[static_cast<std::size_t>(i)]);
}

void polyvec_frombytes(PolyVec& v, const std::uint8_t* in) {
    for (int i = 0; i < kK; ++i) poly_frombytes(v[static_cast<std::size_t>(i)], in + i * kPolyBytes);
}

void poly_frommsg(Poly& p, const std::uint8_t msg[kSymBytes]) {
    for (std::size_t i = 0; i < kSymBytes; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            std::int16_t mask = static_cast<std::int16_t>(-static_cast<std::int16_t>((msg[i] >> j) & 1));
            p.c[8 * i + j] = static_cast<std::int16_t>(mask & ((kQ + 1) / 2));
        }
    }
}

void poly_tomsg(std::uint8_t msg[kSymBytes], const Poly& p) {
    std::memset(msg, 0, kSymBytes);
    for (std::size_t i = 0; i < kSymBytes; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            std::uint16_t u = to_unsigned(p.c[8 * i + j]);
            std::uint8_t bit = static_cast<std::uint8_t>(
                (((static_cast<std::uint32_t>(u) << 1) + kQ / 2) / kQ) & 1);
            msg[i] |= static_cast<std::uint8_t>(bit << j);
        }
    }
}

// Uniform rejection sampling from a SHAKE128 stream: 12-bit candidates,
// accepted when below q. The stream is seed || x || y.
void poly_uniform(Poly& p, const std::uint8_t seed[kSymBytes], std::uint8_t x, std::uint8_t y) {
    KeccakSponge xof = shake128_sponge();
    std::uint8_t hdr[kSymBytes + 2];
    std::memcpy(hdr, seed, kSymBytes);
    hdr[kSymBytes] = x;
    hdr[kSymBytes + 1] = y;
    xof.absorb(ByteView(hdr, sizeof hdr));

    std::uint8_t buf[168 * 3];
    xof.squeeze(buf, sizeof buf);
    std::size_t buflen = sizeof buf;
    int ctr = 0;
    while (true) {
        for (std::size_t pos = 0; pos + 3 <= buflen && ctr < kN; pos += 3) {
            std::uint16_t v0 = static_cast<std::uint16_t>(
                (buf[pos] | (static_cast<std::uint16_t>(buf[pos + 1]) << 8)) & 0xFFF);
            std::uint16_t v1 = static_cast<std::uint16_t>(
                ((buf[pos + 1] >> 4) | (static_cast<std::uint16_t>(buf[pos + 2]) << 4)) & 0xFFF);
            if (v0 < kQ) p.c[static_cast<std::size_t>(ctr++)] = static_cast<std::int16_t>(v0);
            if (ctr < kN && v1 < kQ) p.c[static_cast<std::size_t>(ctr++)] = static_cast<std::int16_t>(v1);
        }
        if (ctr == kN) break;
        xof.squeeze(buf, 168);
        buflen = 168;
    }
}

void gen_matrix(PolyVec a[kK], const std::uint8_t seed[kSymBytes], bool transposed) {
    for (int i = 0; i < kK; ++i) {
        for (int j = 0; j < kK; ++j) {
            if (transposed) {
                poly_uniform(a[i][static_cast<std::size_t>(j)], seed, static_cast<std::uint8_t>(i),
                             static_cast<std::uint8_t>(j));
            } else {
                poly_uniform(a[i][static_cast<std::size_t>(j)], seed, static_cast<std::uint8_t>(j),
                             static_cast<std::uint8_t>(i));
            }
        }
    }
}

// Centered binomial noise, eta = 2: 4 bytes produce 8 coefficients.
void poly_cbd2(Poly& p, const std::uint8_t buf[128]) {
    for (std::size_t i = 0; i < kN / 8; ++i) {
        std::uint32_t t;
        std::memcpy(&t, buf + 4 * i, 4);  // little-endian load
        std::uint32_t d = (t & 0x55555555u) + ((t >> 1) & 0x55555555u);
        for (std::size_t j = 0; j < 8; ++j) {
            std::int16_t a = static_cast<std::int16_t>((d >> (4 * j)) & 0x3);
            std::int16_t b = static_cast<std::int16_t>((d >> (4 * j + 2)) & 0x3);
            p.c[8 * i + j] = static_cast<std::int16_t>(a - b);
        }
    }
}

void poly_getnoise(Poly& p, const std::uint8_t seed[kSymBytes], std::uint8_t nonce) {
    std::uint8_t extseed[kSymBytes + 1];
    std::memcpy(extseed, seed, kSymBytes);
    extseed[kSymBytes] = nonce;
    Bytes buf = shake256(ByteView(extseed, sizeof extseed), kEta1 * kN / 4);
    poly_cbd2(p, buf.data());
}
static_assert(kEta1 == kEta2, "single CBD sampler assumes eta1 == eta2");

// ---- IND-CPA PKE ----

void indcpa_keypair(std::uint8_t* pk, std::uint8_t* sk, const std::uint8_t d[kSymBytes]) {
    auto seeds = sha3_512(ByteView(d, kSymBytes));
    const std::uint8_t* pubseed = seeds.data();
    const std::uint8_t* noiseseed = seeds.data() + kSymBytes;

    PolyVec a[kK];
    gen_matrix(a, pubseed, false);

    PolyVec s, e;
    std::uint8_t nonce = 0;
    for (auto& p : s) poly_getnoise(p, noiseseed, nonce++);
    for (auto& p : e) poly_getnoise(p, noiseseed, nonce++);
    for (auto& p : s) ntt(p);
    for (auto& p : e) ntt(p);

    PolyVec t;
    for (std::size_t i = 0; i < kK; ++i) {
        polyvec_basemul_acc(t[i], a[i], s);
        poly_tomont(t[i]);
        poly_add(t[i], t[i], e[i]);
        poly_reduce(t[i]);
    }

    polyvec_tobytes(sk, s);
    polyvec_tobytes(pk, t);
    std::memcpy(pk + kPolyVecBytes, pubseed, kSymBytes);
}

void indcpa_enc(std::uint8_t* ct, const std::uint8_t m[kSymBytes], const std::uint8_t* pk,
                const std::uint8_t coins[kSymBytes]) {
    PolyVec that;
    polyvec_frombytes(that, pk);
    const std::uint8_t* pubseed = pk + kPolyVecBytes;

    PolyVec at[kK];
    gen_matrix(at, pubseed, true);

    PolyVec r, e1;
    Poly e2;
    std::uint8_t nonce = 0;
    for (auto& p : r) poly_getnoise(p, coins, nonce++);
    for (auto& p : e1) poly_getnoise(p, coins, nonce++);
    poly_getnoise(e2, coins, nonce++);
    for (auto& p : r) ntt(p);

    PolyVec u;
    for (std::size_t i = 0; i < kK; ++i) {
        polyvec_basemul_acc(u[i], at[i], r);
        inv_ntt(u[i]);
        poly_add(u[i], u[i], e1[i]);
        poly_reduce(u[i]);
    }

    Poly v, msg_poly;
    polyvec_basemul_acc(v, that, r);
    inv_ntt(v);
    poly_frommsg(msg_poly, m);
    poly_add(v, v, e2);
    poly_add(v, v, msg_poly);
    poly_reduce(v);

    polyvec_compress(ct, u);
    poly_compress(ct + kPolyVecCompressedBytes, v);
}

void indcpa_dec(std::uint8_t m[kSymBytes], const std::uint8_t* ct, const std::uint8_t* sk) {
    PolyVec u, s;
    polyvec_decompress(u, ct);
    polyvec_frombytes(s, sk);

    Poly v;
    poly_decompress(v, ct + kPolyVecCompressedBytes);

    for (auto& p : u) ntt(p);
    Poly mp;
    polyvec_basemul_acc(mp, s, u);
    inv_ntt(mp);
    poly_sub(mp, v, mp);
    poly_reduce(mp);
    poly_tomsg(m, mp);
}

}  // namespace

// ---- CCA KEM (FO transform with hashed message and final KDF) ----

KemKeyPair kem_keygen(ByteView seed) {
    if (seed.size() != kKeygenSeedBytes) {
        throw std::invalid_argument("kyber768::kem_keygen: seed must be 64 bytes");
    }
    KemKeyPair kp;
    kp.public_key.resize(kPublicKeyBytes);
    kp.secret_key.resize(kSecretKeyBytes);
    indcpa_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
    std::memcpy(kp.secret_key.data() + kIndcpaSecretBytes, kp.public_key.data(), kPublicKeyBytes);
    auto pk_hash = sha3_256(kp.public_key);
    std::memcpy(kp.secret_key.data() + kSecretKeyBytes - 2 * kSymBytes, pk_hash.data(), kSymBytes);
    std::memcpy(kp.secret_key.data() + kSecretKeyBytes - kSymBytes, seed.data() + kSymBytes,
                kSymBytes);
    return kp;
}

EncapsResult encaps(ByteView public_key, ByteView seed) {
    if (public_key.size() != kPublicKeyBytes) {
        throw std::invalid_argument("kyber768::encaps: bad public key length");
    }
    if (seed.size() != kEncapsSeedBytes) {
        throw std::invalid_argument("kyber768::encaps: seed must be 32 bytes");
    }
    std::uint8_t buf[2 * kSymBytes];
    auto m = sha3_256(seed);  // never expose raw caller randomness
    std::memcpy(buf, m.data(), kSymBytes);
    auto pk_hash = sha3_256(public_key);
    std::memcpy(buf + kSymBytes, pk_hash.data(), kSymBytes);

    auto kr = sha3_512(ByteView(buf, sizeof buf));

    EncapsResult res;
    res.ciphertext.resize(kCiphertextBytes);
    indcpa_enc(res.ciphertext.data(), buf, public_key.data(), kr.data() + kSymBytes);

    auto ct_hash = sha3_256(res.ciphertext);
    std::memcpy(kr.data() + kSymBytes, ct_hash.data(), kSymBytes);
    Bytes ss = shake256(ByteView(kr.data(), kr.size()), kSharedSecretBytes);
    std::memcpy(res.shared_secret.data(), ss.data(), kSharedSecretBytes);
    return res;
}

SharedSecret decaps(ByteView secret_key, ByteView ciphertext) {
    if (secret_key.size() != kSecretKeyBytes) {
        throw std::invalid_argument("kyber768::decaps: bad secret key length");
    }
    if (ciphertext.size() != kCiphertextBytes) {
        throw std::invalid_argument("kyber768::decaps: bad ciphertext length");
    }
    const std::uint8_t* pk = secret_key.data() + kIndcpaSecretBytes;
    const std::uint8_t* pk_hash = secret_key.data() + kSecretKeyBytes - 2 * kSymBytes;
    const std::uint8_t* z = secret_key.data() + kSecretKeyBytes - kSymBytes;

    std::uint8_t buf[2 * kSymBytes];
    indcpa_dec(buf, ciphertext.data(), secret_key.data());
    std::memcpy(buf + kSymBytes, pk_hash, kSymBytes);

    auto kr = sha3_512(ByteView(buf, sizeof buf));

    Bytes cmp(kCiphertextBytes);
    indcpa_enc(cmp.data(), buf, pk, kr.data() + kSymBytes);
    bool ok = ct_equal(ciphertext, cmp);

    auto ct_hash = sha3_256(ciphertext);
    std::memcpy(kr.data() + kSymBytes, ct_hash.data(), kSymBytes);
    if (!ok) std::memcpy(kr.data(), z, kSymBytes);  // implicit rejection

    Bytes ss = shake256(ByteView(kr.data(), kr.size()), kSharedSecretBytes);
    SharedSecret out;
    std::memcpy(out.data(), ss.data(), kSharedSecretBytes);
    return out;
}

}  // namespace qgp::kyber768
