#pragma once

#include <array>
#include <cstdint>

#include "qgp/bytes.hpp"

namespace qgp {

/// AES-256-CTR DRBG with the exact update/extract schedule of the NIST PQC
/// KAT harness, so response files regenerate bit-for-bit from the standard
/// entropy input.
class NistCtrDrbg {
public:
    /// entropy_input is 48 bytes; personalization, when given, is 48 bytes
    /// XORed into the seed material.
    explicit NistCtrDrbg(ByteView entropy_input, ByteView personalization = {});

    void generate(std::uint8_t* out, std::size_t len);
    Bytes generate(std::size_t len);

private:
    void update(const std::uint8_t* provided_data);

    std::array<std::uint8_t, 32> key_{};
    std::array<std::uint8_t, 16> v_{};
};

}  // namespace qgp
