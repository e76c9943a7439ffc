#pragma once

#include <array>
#include <cstdint>

#include "qgp/bytes.hpp"

namespace qgp {

enum class HashAlgorithm : std::uint8_t {
    Sha2_256,
    Sha3_256,
};

struct Digest {
    HashAlgorithm algorithm;
    std::array<std::uint8_t, 32> bytes;

    ByteView view() const { return ByteView(bytes.data(), bytes.size()); }
    bool operator==(const Digest&) const = default;
};

Digest hash(ByteView message, HashAlgorithm algorithm);

}  // namespace qgp
