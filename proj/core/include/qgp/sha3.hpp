#pragma once

#include <array>
#include <cstdint>

#include "qgp/bytes.hpp"

namespace qgp {

/// Keccak[1600] sponge with incremental absorb/squeeze. Covers the fixed
/// SHA-3 digests and the SHAKE XOFs; everything lattice-side (matrix
/// expansion, noise PRFs, challenge sampling) runs through this one core.
class KeccakSponge {
public:
    KeccakSponge(std::size_t rate_bytes, std::uint8_t domain_sep);

    void absorb(ByteView data);
    /// Switches the sponge to squeezing; absorb() is illegal afterwards.
    void squeeze(std::uint8_t* out, std::size_t len);
    Bytes squeeze(std::size_t len);

    std::size_t rate() const { return rate_; }

private:
    void permute();
    void finish_absorb();

    std::array<std::uint64_t, 25> state_{};
    std::size_t rate_;
    std::uint8_t domain_;
    std::size_t pos_ = 0;
    bool squeezing_ = false;
};

inline KeccakSponge shake128_sponge() { return KeccakSponge(168, 0x1f); }
inline KeccakSponge shake256_sponge() { return KeccakSponge(136, 0x1f); }

std::array<std::uint8_t, 32> sha3_256(ByteView data);
std::array<std::uint8_t, 64> sha3_512(ByteView data);

Bytes shake128(ByteView data, std::size_t out_len);
Bytes shake256(ByteView data, std::size_t out_len);

}  // namespace qgp
