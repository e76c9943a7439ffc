#include "qgp/dilithium3.hpp"

#include <array>
#include <cstring>
#include <stdexcept>

#include "qgp/sha3.hpp"

namespace qgp::dilithium3 {

namespace {

constexpr int kN = 256;
constexpr std::int32_t kQ = 8380417;
constexpr int kD = 13;
constexpr int kK = 6;
constexpr int kL = 5;
constexpr std::int32_t kEta = 4;
constexpr int kTau = 49;
constexpr std::int32_t kBeta = 196;
constexpr std::int32_t kGamma1 = 1 << 19;
constexpr std::int32_t kGamma2 = (kQ - 1) / 32;
constexpr unsigned kOmega = 55;
constexpr int kSeedBytes = 32;
constexpr int kCrhBytes = 64;

constexpr std::size_t kPolyT1Bytes = 320;   // 10-bit
constexpr std::size_t kPolyT0Bytes = 416;   // 13-bit
constexpr std::size_t kPolyEtaBytes = 128;  // 4-bit
constexpr std::size_t kPolyZBytes = 640;    // 20-bit
constexpr std::size_t kPolyW1Bytes = 128;   // 4-bit
constexpr std::size_t kHintBytes = kOmega + kK;

constexpr std::uint64_t kQinv = 58728449;  // q^-1 mod 2^32

struct Poly {
    std::array<std::int32_t, kN> c{};
};
using PolyVecL = std::array<Poly, kL>;
using PolyVecK = std::array<Poly, kK>;

std::int32_t montgomery_reduce(std::int64_t a) {
    std::int32_t t = static_cast<std::int32_t>(static_cast<std::uint64_t>(a) * kQinv);
    return static_cast<std::int32_t>((a - static_cast<std::int64_t>(t) * kQ) >> 32);
}

std::int32_t reduce32(std::int32_t a) {
    std::int32_t t = (a + (1 << 22)) >> 23;
    return a - t * kQ;
}

std::int32_t caddq(std::int32_t a) { return a + ((a >> 31) & kQ); }

// zetas[i] = 1753^bitrev8(i) * 2^32 mod+- q.
struct ZetaTable {
    std::array<std::int32_t, kN> z{};
    ZetaTable() {
        auto bitrev8 = [](int v) {
            int r = 0;
            for (int b = 0; b < 8; ++b) r = (r << 1) | ((v >> b) & 1);
            return r;
        };
        std::int64_t pow[kN];
        pow[0] = 1;
        for (int i = 1; i < kN; ++i) pow[i] = (pow[i - 1] * 1753) % kQ;
        for (int i = 0; i < kN; ++i) {
            std::int64_t v = (pow[bitrev8(i)] << 32) % kQ;
            if (v > kQ / 2) v -= kQ;
            z[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(v);
        }
    }
};
const ZetaTable kZetas;

void ntt(Poly& p) {
    auto& a = p.c;
    int k = 0;
    for (int len = 128; len > 0; len >>= 1) {
        for (int start = 0; start < kN; start += 2 * len) {
            std::int32_t zeta = kZetas.z[static_cast<std::size_t>(++k)];
            for (int j = start; j < start + len; ++j) {
                std::int32_t t =
                    montgomery_reduce(static_cast<std::int64_t>(zeta) * a[static_cast<std::size_t>(j + len)]);
                a[static_cast<std::size_t>(j + len)] = a[static_cast<std::size_t>(j)] - t;
                a[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)] + t;
            }
        }
    }
}

void inv_ntt_tomont(Poly& p) {
    auto& a = p.c;
    constexpr std::int32_t f = 41978;  // 2^64 / 256 mod q
    int k = kN;
    for (int len = 1; len < kN; len <<= 1) {
        for (int start = 0; start < kN; start += 2 * len) {
            std::int32_t zeta = -kZetas.z[static_cast<std::size_t>(--k)];
            for (int j = start; j < start + len; ++j) {
                std::int32_t t = a[static_cast<std::size_t>(j)];
                a[static_cast<std::size_t>(j)] = t + a[static_cast<std::size_t>(j + len)];
                a[static_cast<std::size_t>(j + len)] = t - a[static_cast<std::size_t>(j + len)];
                a[static_cast<std::size_t>(j + len)] =
                    montgomery_reduce(static_cast<std::int64_t>(zeta) * a[static_cast<std::size_t>(j + len)]);
            }
        }
    }
    for (auto& c : a) c = montgomery_reduce(static_cast<std::int64_t>(f) * c);
}

void poly_pointwise_montgomery(Poly& r, const Poly& a, const Poly& b) {
    for (std::size_t i = 0; i < kN; ++i) {
        r.c[i] = montgomery_reduce(static_cast<std::int64_t>(a.c[i]) * b.c[i]);
    }
}

void poly_add(Poly& r, const Poly& a, const Poly& b) {
    for (std::size_t i = 0; i < kN; ++i) r.c[i] = a.c[i] + b.c[i];
}

void poly_sub(Poly& r, const Poly& a, const Poly& b) {
    for (std::size_t i = 0; i < kN; ++i) r.c[i] = a.c[i] - b.c[i];
}

void poly_reduce(Poly& p) {
    for (auto& c : p.c) c = reduce32(c);
}

void poly_caddq(Poly& p) {
    for (auto& c : p.c) c = caddq(c);
}

void poly_shiftl(Poly& p) {
    for (auto& c : p.c) c <<= kD;
}

// True when some coefficient reaches the bound in absolute value.
bool poly_chknorm(const Poly& p, std::int32_t bound) {
    if (bound > (kQ - 1) / 8) return true;
    for (std::int32_t c : p.c) {
        std::int32_t t = c >> 31;
        t = c - (t & 2 * c);
        if (t >= bound) return true;
    }
    return false;
}

std::int32_t power2round(std::int32_t a, std::int32_t& a0) {
    std::int32_t a1 = (a + (1 << (kD - 1)) - 1) >> kD;
    a0 = a - (a1 << kD);
    return a1;
}

std::int32_t decompose(std::int32_t a, std::int32_t& a0) {
    std::int32_t a1 = (a + 127) >> 7;
    a1 = (a1 * 1025 + (1 << 21)) >> 22;
    a1 &= 15;
    a0 = a - a1 * 2 * kGamma2;
    a0 -= (((kQ - 1) / 2 - a0) >> 31) & kQ;
    return a1;
}

bool make_hint(std::int32_t a0, std::int32_t a1) {
    return a0 > kGamma2 || a0 < -kGamma2 || (a0 == -kGamma2 && a1 != 0);
}

std::int32_t use_hint(std::int32_t a, bool hint) {
    std::int32_t a0;
    std::int32_t a1 = decompose(a, a0);
    if (!hint) return a1;
    return a0 > 0 ? (a1 + 1) & 15 : (a1 - 1) & 15;
}

// ---- samplers ----

KeccakSponge stream128(const std::uint8_t* seed, std::size_t seed_len, std::uint16_t nonce) {
    KeccakSponge s = shake128_sponge();
    s.absorb(ByteView(seed, seed_len));
    std::uint8_t n[2] = {static_cast<std::uint8_t>(nonce), static_cast<std::uint8_t>(nonce >> 8)};
    s.absorb(ByteView(n, 2));
    return s;
}

KeccakSponge stream256(const std::uint8_t* seed, std::size_t seed_len, std::uint16_t nonce) {
    KeccakSponge s = shake256_sponge();
    s.absorb(ByteView(seed, seed_len));
    std::uint8_t n[2] = {static_cast<std::uint8_t>(nonce), static_cast<std::uint8_t>(nonce >> 8)};
    s.absorb(ByteView(n, 2));
    return s;
}

// Uniform coefficients below q from 23-bit candidates.
void poly_uniform(Poly& p, const std::uint8_t seed[kSeedBytes], std::uint16_t nonce) {
    KeccakSponge s = stream128(seed, kSeedBytes, nonce);
    std::uint8_t buf[3];
    int ctr = 0;
    while (ctr < kN) {
        s.squeeze(buf, 3);
        std::uint32_t t = (static_cast<std::uint32_t>(buf[0]) |
                           (static_cast<std::uint32_t>(buf[1]) << 8) |
                           (static_cast<std::uint32_t>(buf[2]) << 16)) &
                          0x7FFFFF;
        if (t < static_cast<std::uint32_t>(kQ)) {
            p.c[static_cast<std::size_t>(ctr++)] = static_cast<std::int32_t>(t);
        }
    }
}

// Coefficients in [-eta, eta] by nibble rejection.
void poly_uniform_eta(Poly& p, const std::uint8_t seed[kCrhBytes], std::uint16_t nonce) {
    KeccakSponge s = stream256(seed, kCrhBytes, nonce);
    int ctr = 0;
    while (ctr < kN) {
        std::uint8_t b;
        s.squeeze(&b, 1);
        std::uint32_t t0 = b & 0x0F;
        std::uint32_t t1 = b >> 4;
        if (t0 < 9) p.c[static_cast<std::size_t>(ctr++)] = kEta - static_cast<std::int32_t>(t0);
        if (t1 < 9 && ctr < kN) p.c[static_cast<std::size_t>(ctr++)] = kEta - static_cast<std::int32_t>(t1);
    }
}

void polyz_unpack(Poly& p, const std::uint8_t* a);

void poly_uniform_gamma1(Poly& p, const std::uint8_t seed[kCrhBytes], std::uint16_t nonce) {
    KeccakSponge s = stream256(seed, kCrhBytes, nonce);
    std::uint8_t buf[kPolyZBytes];
    s.squeeze(buf, sizeof buf);
    polyz_unpack(p, buf);
}

// tau signed flips at stream-chosen positions.
void poly_challenge(Poly& p, const std::uint8_t seed[kSeedBytes]) {
    KeccakSponge s = shake256_sponge();
    s.absorb(ByteView(seed, kSeedBytes));
    std::uint8_t buf[8];
    s.squeeze(buf, 8);
    std::uint64_t signs = 0;
    for (int i = 0; i < 8; ++i) signs |= static_cast<std::uint64_t>(buf[i]) << (8 * i);

    p.c.fill(0);
    for (int i = kN - kTau; i < kN; ++i) {
        std::uint8_t b;
        do {
            s.squeeze(&b, 1);
        } while (b > i);
        p.c[static_cast<std::size_t>(i)] = p.c[b];
        p.c[b] = 1 - 2 * static_cast<std::int32_t>(signs & 1);
        signs >>= 1;
    }
}

// ---- little-endian bit packing ----

void pack_bits(std::uint8_t* out, const std::uint32_t* vals, int width) {
    std::size_t bit = 0;
    std::memset(out, 0, static_cast<std::size_t>(kN) * static_cast<std::size_t>(width) / 8);
    for (int i = 0; i < kN; ++i) {
        std::uint32_t v = vals[i];
        for (int b = 0; b < width; ++b) {
            out[(bit + static_cast<std::size_t>(b)) / 8] |=
                static_cast<std::uint8_t>(((v >> b) & 1) << ((bit + static_cast<std::size_t>(b)) % 8));
        }
        bit += static_cast<std::size_t>(width);
    }
}

void unpack_bits(std::uint32_t* vals, const std::uint8_t* in, int width) {
    std::size_t bit = 0;
    for (int i = 0; i < kN; ++i) {
        std::uint32_t v = 0;
        for (int b = 0; b < width; ++b) {
            v |= static_cast<std::uint32_t>((in[(bit + static_cast<std::size_t>(b)) / 8] >>
                                             ((bit + static_cast<std::size_t>(b)) % 8)) &
                                            1)
                 << b;
        }
        vals[i] = v;
        bit += static_cast<std::size_t>(width);
    }
}

void polyt1_pack(std::uint8_t* r, const Poly& a) {
    std::uint32_t t[kN];
    for (int i = 0; i < kN; ++i) t[i] = static_cast<std::uint32_t>(a.c[static_cast<std::size_t>(i)]);
    pack_bits(r, t, 10);
}

void polyt1_unpack(Poly& r, const std::uint8_t* a) {
    std::uint32_t t[kN];
    unpack_bits(t, a, 10);
    for (int i = 0; i < kN; ++i) r.c[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(t[i]);
}

void polyt0_pack(std::uint8_t* r, const Poly& a) {
    std::uint32_t t[kN];
    for (int i = 0; i < kN; ++i) {
        t[i] = static_cast<std::uint32_t>((1 << (kD - 1)) - a.c[static_cast<std::size_t>(i)]);
    }
    pack_bits(r, t, 13);
}

void polyt0_unpack(Poly& r, const std::uint8_t* a) {
    std::uint32_t t[kN];
    unpack_bits(t, a, 13);
    for (int i = 0; i < kN; ++i) {
        r.c[static_cast<std::size_t>(i)] = (1 << (kD - 1)) - static_cast<std::int32_t>(t[i]);
    }
}

void polyeta_pack(std::uint8_t* r, const Poly& a) {
    std::uint32_t t[kN];
    for (int i = 0; i < kN; ++i) {
        t[i] = static_cast<std::uint32_t>(kEta - a.c[static_cast<std::size_t>(i)]);
    }
    pack_bits(r, t, 4);
}

void polyeta_unpack(Poly& r, const std::uint8_t* a) {
    std::uint32_t t[kN];
    unpack_bits(t, a, 4);
    for (int i = 0; i < kN; ++i) {
        r.c[static_cast<std::size_t>(i)] = kEta - static_cast<std::int32_t>(t[i]);
    }
}

void polyz_pack(std::uint8_t* r, const Poly& a) {
    std::uint32_t t[kN];
    for (int i = 0; i < kN; ++i) {
        t[i] = static_cast<std::uint32_t>(kGamma1 - a.c[static_cast<std::size_t>(i)]);
    }
    pack_bits(r, t, 20);
}

void polyz_unpack(Poly& r, const std::uint8_t* a) {
    std::uint32_t t[kN];
    unpack_bits(t, a, 20);
    for (int i = 0; i < kN; ++i) {
        r.c[static_cast<std::size_t>(i)] = kGamma1 - static_cast<std::int32_t>(t[i]);
    }
}

void polyw1_pack(std::uint8_t* r, const Poly& a) {
    for (std::size_t i = 0; i < kN / 2; ++i) {
        r[i] = static_cast<std::uint8_t>(a.c[2 * i] | (a.c[2 * i + 1] << 4));
    }
}

// ---- vector helpers ----

void matrix_expand(std::array<PolyVecL, kK>& mat, const std::uint8_t rho[kSeedBytes]) {
    for (int i = 0; i < kK; ++i) {
        for (int j = 0; j < kL; ++j) {
            poly_uniform(mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], rho,
                         static_cast<std::uint16_t>((i << 8) + j));
        }
    }
}

void matrix_pointwise(PolyVecK& w, const std::array<PolyVecL, kK>& mat, const PolyVecL& v) {
    Poly t;
    for (int i = 0; i < kK; ++i) {
        poly_pointwise_montgomery(w[static_cast<std::size_t>(i)], mat[static_cast<std::size_t>(i)][0], v[0]);
        for (int j = 1; j < kL; ++j) {
            poly_pointwise_montgomery(t, mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                                      v[static_cast<std::size_t>(j)]);
            poly_add(w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(i)], t);
        }
    }
}

template <std::size_t M>
void vec_ntt(std::array<Poly, M>& v) {
    for (auto& p : v) ntt(p);
}
template <std::size_t M>
void vec_invntt_tomont(std::array<Poly, M>& v) {
    for (auto& p : v) inv_ntt_tomont(p);
}
template <std::size_t M>
void vec_reduce(std::array<Poly, M>& v) {
    for (auto& p : v) poly_reduce(p);
}
template <std::size_t M>
void vec_caddq(std::array<Poly, M>& v) {
    for (auto& p : v) poly_caddq(p);
}
template <std::size_t M>
void vec_add(std::array<Poly, M>& r, const std::array<Poly, M>& a, const std::array<Poly, M>& b) {
    for (std::size_t i = 0; i < M; ++i) poly_add(r[i], a[i], b[i]);
}
template <std::size_t M>
void vec_sub(std::array<Poly, M>& r, const std::array<Poly, M>& a, const std::array<Poly, M>& b) {
    for (std::size_t i = 0; i < M; ++i) poly_sub(r[i], a[i], b[i]);
}
template <std::size_t M>
bool vec_chknorm(const std::array<Poly, M>& v, std::int32_t bound) {
    for (const auto& p : v) {
        if (poly_chknorm(p, bound)) return true;
    }
    return false;
}
template <std::size_t M>
void vec_pointwise_poly(std::array<Poly, M>& r, const Poly& a, const std::array<Poly, M>& v) {
    for (std::size_t i = 0; i < M; ++i) poly_pointwise_montgomery(r[i], a, v[i]);
}

void pack_w1(std::uint8_t* buf, const PolyVecK& w1) {
    for (int i = 0; i < kK; ++i) {
        polyw1_pack(buf + static_cast<std::size_t>(i) * kPolyW1Bytes, w1[static_cast<std::size_t>(i)]);
    }
}

// Hint vector encoding: nonzero positions per polynomial, then running
// counts; strictly increasing positions and zeroed tail are enforced on
// decode for strong unforgeability.
void pack_hints(std::uint8_t* out, const PolyVecK& h) {
    std::memset(out, 0, kHintBytes);
    unsigned k = 0;
    for (int i = 0; i < kK; ++i) {
        for (int j = 0; j < kN; ++j) {
            if (h[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(j)] != 0) {
                out[k++] = static_cast<std::uint8_t>(j);
            }
        }
        out[kOmega + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(k);
    }
}

bool unpack_hints(PolyVecK& h, const std::uint8_t* in) {
    unsigned k = 0;
    for (int i = 0; i < kK; ++i) {
        h[static_cast<std::size_t>(i)].c.fill(0);
        std::uint8_t count = in[kOmega + static_cast<std::size_t>(i)];
        if (count < k || count > kOmega) return false;
        for (unsigned j = k; j < count; ++j) {
            if (j > k && in[j] <= in[j - 1]) return false;
            h[static_cast<std::size_t>(i)].c[in[j]] = 1;
        }
        k = count;
    }
    for (unsigned j = k; j < kOmega; ++j) {
        if (in[j] != 0) return false;
    }
    return true;
}

struct SecretKeyView {
    const std::uint8_t* rho;
    const std::uint8_t* key;
    const std::uint8_t* tr;
    PolyVecL s1;
    PolyVecK s2;
    PolyVecK t0;
};

SecretKeyView unpack_sk(const std::uint8_t* sk) {
    SecretKeyView v;
    v.rho = sk;
    v.key = sk + kSeedBytes;
    v.tr = sk + 2 * kSeedBytes;
    const std::uint8_t* p = sk + 3 * kSeedBytes;
    for (int i = 0; i < kL; ++i, p += kPolyEtaBytes) polyeta_unpack(v.s1[static_cast<std::size_t>(i)], p);
    for (int i = 0; i < kK; ++i, p += kPolyEtaBytes) polyeta_unpack(v.s2[static_cast<std::size_t>(i)], p);
    for (int i = 0; i < kK; ++i, p += kPolyT0Bytes) polyt0_unpack(v.t0[static_cast<std::size_t>(i)], p);
    return v;
}

}  // namespace

SigKeyPair sig_keygen(ByteView seed) {
    if (seed.size() != kKeygenSeedBytes) {
        throw std::invalid_argument("dilithium3::sig_keygen: seed must be 32 bytes");
    }
    Bytes seedbuf = shake256(seed, 2 * kSeedBytes + kCrhBytes);
    const std::uint8_t* rho = seedbuf.data();
    const std::uint8_t* rhoprime = rho + kSeedBytes;
    const std::uint8_t* key = rhoprime + kCrhBytes;

    std::array<PolyVecL, kK> mat;
    matrix_expand(mat, rho);

    PolyVecL s1;
    PolyVecK s2;
    for (int i = 0; i < kL; ++i) {
        poly_uniform_eta(s1[static_cast<std::size_t>(i)], rhoprime, static_cast<std::uint16_t>(i));
    }
    for (int i = 0; i < kK; ++i) {
        poly_uniform_eta(s2[static_cast<std::size_t>(i)], rhoprime, static_cast<std::uint16_t>(kL + i));
    }

    PolyVecL s1hat = s1;
    vec_ntt(s1hat);
    PolyVecK t;
    matrix_pointwise(t, mat, s1hat);
    vec_reduce(t);
    vec_invntt_tomont(t);
    vec_add(t, t, s2);
    vec_caddq(t);

    PolyVecK t1, t0;
    for (int i = 0; i < kK; ++i) {
        for (int j = 0; j < kN; ++j) {
            t1[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(j)] = power2round(
                t[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(j)],
                t0[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(j)]);
        }
    }

    SigKeyPair kp;
    kp.public_key.resize(kPublicKeyBytes);
    std::memcpy(kp.public_key.data(), rho, kSeedBytes);
    for (int i = 0; i < kK; ++i) {
        polyt1_pack(kp.public_key.data() + kSeedBytes + static_cast<std::size_t>(i) * kPolyT1Bytes,
                    t1[static_cast<std::size_t>(i)]);
    }

    Bytes tr = shake256(kp.public_key, kSeedBytes);

    kp.secret_key.resize(kSecretKeyBytes);
    std::uint8_t* p = kp.secret_key.data();
    std::memcpy(p, rho, kSeedBytes);
    p += kSeedBytes;
    std::memcpy(p, key, kSeedBytes);
    p += kSeedBytes;
    std::memcpy(p, tr.data(), kSeedBytes);
    p += kSeedBytes;
    for (int i = 0; i < kL; ++i, p += kPolyEtaBytes) polyeta_pack(p, s1[static_cast<std::size_t>(i)]);
    for (int i = 0; i < kK; ++i, p += kPolyEtaBytes) polyeta_pack(p, s2[static_cast<std::size_t>(i)]);
    for (int i = 0; i < kK; ++i, p += kPolyT0Bytes) polyt0_pack(p, t0[static_cast<std::size_t>(i)]);
    return kp;
}

Bytes sign(ByteView secret_key, ByteView message) {
    if (secret_key.size() != kSecretKeyBytes) {
        throw std::invalid_argument("dilithium3::sign: bad secret key length");
    }
    SecretKeyView sk = unpack_sk(secret_key.data());

    KeccakSponge mu_sponge = shake256_sponge();
    mu_sponge.absorb(ByteView(sk.tr, kSeedBytes));
    mu_sponge.absorb(message);
    std::uint8_t mu[kCrhBytes];
    mu_sponge.squeeze(mu, kCrhBytes);

    // Deterministic signing: rhoprime binds the signing key and mu.
    KeccakSponge rp_sponge = shake256_sponge();
    rp_sponge.absorb(ByteView(sk.key, kSeedBytes));
    rp_sponge.absorb(ByteView(mu, kCrhBytes));
    std::uint8_t rhoprime[kCrhBytes];
    rp_sponge.squeeze(rhoprime, kCrhBytes);

    std::array<PolyVecL, kK> mat;
    matrix_expand(mat, sk.rho);
    vec_ntt(sk.s1);
    vec_ntt(sk.s2);
    vec_ntt(sk.t0);

    Bytes sig(kSignatureBytes);
    std::uint16_t nonce = 0;
    while (true) {
        PolyVecL y;
        for (int i = 0; i < kL; ++i) {
            poly_uniform_gamma1(y[static_cast<std::size_t>(i)], rhoprime,
                                static_cast<std::uint16_t>(kL * nonce + i));
        }
        ++nonce;

        PolyVecL z = y;
        vec_ntt(z);
        PolyVecK w;
        matrix_pointwise(w, mat, z);
        vec_reduce(w);
        vec_invntt_tomont(w);
        vec_caddq(w);

        PolyVecK w1, w0;
        for (int i = 0; i < kK; ++i) {
            for (int j = 0; j < kN; ++j) {
                w1[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(j)] = decompose(
                    w[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(j)],
                    w0[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(j)]);
            }
        }
        std::uint8_t w1_packed[kK * kPolyW1Bytes];
        pack_w1(w1_packed, w1);

        KeccakSponge c_sponge = shake256_sponge();
        c_sponge.absorb(ByteView(mu, kCrhBytes));
        c_sponge.absorb(ByteView(w1_packed, sizeof w1_packed));
        std::uint8_t c_seed[kSeedBytes];
        c_sponge.squeeze(c_seed, kSeedBytes);

        Poly cp;
        poly_challenge(cp, c_seed);
        ntt(cp);

        vec_pointwise_poly(z, cp, sk.s1);
        vec_invntt_tomont(z);
        vec_add(z, z, y);
        vec_reduce(z);
        if (vec_chknorm(z, kGamma1 - kBeta)) continue;

        PolyVecK h;
        vec_pointwise_poly(h, cp, sk.s2);
        vec_invntt_tomont(h);
        vec_sub(w0, w0, h);
        vec_reduce(w0);
        if (vec_chknorm(w0, kGamma2 - kBeta)) continue;

        vec_pointwise_poly(h, cp, sk.t0);
        vec_invntt_tomont(h);
        vec_reduce(h);
        if (vec_chknorm(h, kGamma2)) continue;

        vec_add(w0, w0, h);
        unsigned hint_count = 0;
        for (int i = 0; i < kK; ++i) {
            for (int j = 0; j < kN; ++j) {
                bool hint = make_hint(w0[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(j)],
                                      w1[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(j)]);
                h[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(j)] = hint ? 1 : 0;
                hint_count += hint ? 1u : 0u;
            }
        }
        if (hint_count > kOmega) continue;

        std::memcpy(sig.data(), c_seed, kSeedBytes);
        for (int i = 0; i < kL; ++i) {
            polyz_pack(sig.data() + kSeedBytes + static_cast<std::size_t>(i) * kPolyZBytes,
                       z[static_cast<std::size_t>(i)]);
        }
        pack_hints(sig.data() + kSeedBytes + kL * kPolyZBytes, h);
        return sig;
    }
}

bool verify(ByteView public_key, ByteView message, ByteView signature) {
    if (public_key.size() != kPublicKeyBytes) {
        throw std::invalid_argument("dilithium3::verify: bad public key length");
    }
    if (signature.size() != kSignatureBytes) return false;

    const std::uint8_t* rho = public_key.data();
    PolyVecK t1;
    for (int i = 0; i < kK; ++i) {
        polyt1_unpack(t1[static_cast<std::size_t>(i)],
                      public_key.data() + kSeedBytes + static_cast<std::size_t>(i) * kPolyT1Bytes);
    }

    const std::uint8_t* c_seed = signature.data();
    PolyVecL z;
    for (int i = 0; i < kL; ++i) {
        polyz_unpack(z[static_cast<std::size_t>(i)],
                     signature.data() + kSeedBytes + static_cast<std::size_t>(i) * kPolyZBytes);
    }
    PolyVecK h;
    if (!unpack_hints(h, signature.data() + kSeedBytes + kL * kPolyZBytes)) return false;
    if (vec_chknorm(z, kGamma1 - kBeta)) return false;

    Bytes tr = shake256(public_key, kSeedBytes);
    KeccakSponge mu_sponge = shake256_sponge();
    mu_sponge.absorb(tr);
    mu_sponge.absorb(message);
    std::uint8_t mu[kCrhBytes];
    mu_sponge.squeeze(mu, kCrhBytes);

    Poly cp;
    poly_challenge(cp, c_seed);

    std::array<PolyVecL, kK> mat;
    matrix_expand(mat, rho);

    vec_ntt(z);
    PolyVecK w1;
    matrix_pointwise(w1, mat, z);

    ntt(cp);
    for (auto& p : t1) {
        poly_shiftl(p);
        ntt(p);
    }
    PolyVecK ct1;
    vec_pointwise_poly(ct1, cp, t1);

    vec_sub(w1, w1, ct1);
    vec_reduce(w1);
    vec_invntt_tomont(w1);
    vec_caddq(w1);

    std::uint8_t w1_packed[kK * kPolyW1Bytes];
    for (int i = 0; i < kK; ++i) {
        Poly used;
        for (int j = 0; j < kN; ++j) {
            used.c[static_cast<std::size_t>(j)] = use_hint(
                w1[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(j)],
                h[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(j)] != 0);
        }
        polyw1_pack(w1_packed + static_cast<std::size_t>(i) * kPolyW1Bytes, used);
    }

    KeccakSponge c_sponge = shake256_sponge();
    c_sponge.absorb(ByteView(mu, kCrhBytes));
    c_sponge.absorb(ByteView(w1_packed, sizeof w1_packed));
    std::uint8_t c2[kSeedBytes];
    c_sponge.squeeze(c2, kSeedBytes);

    return std::memcmp(c_seed, c2, kSeedBytes) == 0;
}

}  // namespace qgp::dilithium3
