#include "qgp/sha3.hpp"

#include <bit>
#include <cstring>

namespace qgp {

namespace {

constexpr std::array<std::uint64_t, 24> kRoundConstants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

// rho offsets and pi lane order, walked together in the permutation.
constexpr std::array<int, 24> kRho = {1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                                      27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};
constexpr std::array<int, 24> kPi = {10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                                     15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

void keccak_f1600(std::array<std::uint64_t, 25>& a) {
    for (int round = 0; round < 24; ++round) {
        // theta
        std::uint64_t c[5];
        for (int x = 0; x < 5; ++x) {
            c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
        }
        for (int x = 0; x < 5; ++x) {
            std::uint64_t d = c[(x + 4) % 5] ^ std::rotl(c[(x + 1) % 5], 1);
            for (int y = 0; y < 25; y += 5) a[x + y] ^= d;
        }
        // rho + pi
        std::uint64_t t = a[1];
        for (int i = 0; i < 24; ++i) {
            std::uint64_t tmp = a[kPi[i]];
            a[kPi[i]] = std::rotl(t, kRho[i]);
            t = tmp;
        }
        // chi
        for (int y = 0; y < 25; y += 5) {
            std::uint64_t row[5];
            for (int x = 0; x < 5; ++x) row[x] = a[y + x];
            for (int x = 0; x < 5; ++x) {
                a[y + x] = row[x] ^ (~row[(x + 1) % 5] & row[(x + 2) % 5]);
            }
        }
        // iota
        a[0] ^= kRoundConstants[round];
    }
}

}  // namespace

KeccakSponge::KeccakSponge(std::size_t rate_bytes, std::uint8_t domain_sep)
    : rate_(rate_bytes), domain_(domain_sep) {}

void KeccakSponge::permute() {
    keccak_f1600(state_);
    pos_ = 0;
}

void KeccakSponge::absorb(ByteView data) {
    if (squeezing_) throw std::logic_error("KeccakSponge: absorb after squeeze");
    for (std::uint8_t b : data) {
        state_[pos_ / 8] ^= std::uint64_t{b} << (8 * (pos_ % 8));
        if (++pos_ == rate_) permute();
    }
}

void KeccakSponge::finish_absorb() {
    state_[pos_ / 8] ^= std::uint64_t{domain_} << (8 * (pos_ % 8));
    state_[(rate_ - 1) / 8] ^= 0x8000000000000000ULL >> (8 * (7 - (rate_ - 1) % 8));
    permute();
    squeezing_ = true;
}

void KeccakSponge::squeeze(std::uint8_t* out, std::size_t len) {
    if (!squeezing_) finish_absorb();
    for (std::size_t i = 0; i < len; ++i) {
        if (pos_ == rate_) permute();
        out[i] = static_cast<std::uint8_t>(state_[pos_ / 8] >> (8 * (pos_ % 8)));
        ++pos_;
    }
}

Bytes KeccakSponge::squeeze(std::size_t len) {
    Bytes out(len);
    squeeze(out.data(), len);
    return out;
}

std::array<std::uint8_t, 32> sha3_256(ByteView data) {
    KeccakSponge sponge(136, 0x06);
    sponge.absorb(data);
    std::array<std::uint8_t, 32> out;
    sponge.squeeze(out.data(), out.size());
    return out;
}

std::array<std::uint8_t, 64> sha3_512(ByteView data) {
    KeccakSponge sponge(72, 0x06);
    sponge.absorb(data);
    std::array<std::uint8_t, 64> out;
    sponge.squeeze(out.data(), out.size());
    return out;
}

Bytes shake128(ByteView data, std::size_t out_len) {
    auto sponge = shake128_sponge();
    sponge.absorb(data);
    return sponge.squeeze(out_len);
}

Bytes shake256(ByteView data, std::size_t out_len) {
    auto sponge = shake256_sponge();
    sponge.absorb(data);
    return sponge.squeeze(out_len);
}

}  // namespace qgp
