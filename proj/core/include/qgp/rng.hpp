#pragma once

#include <cstdint>
#include <random>

#include "qgp/bytes.hpp"

namespace qgp {

/// mt19937_64 with hand-rolled draw helpers. The standard pins the engine's
/// output sequence but not the distributions, so uniform doubles and
/// bounded draws are derived from raw engine words to keep runs
/// bit-reproducible across toolchains.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() & 1); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform_double() < p;
    }

    /// Uniform in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) return 0;
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

    void fill(std::uint8_t* out, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) out[i] = static_cast<std::uint8_t>(engine_());
    }

    Bytes bytes(std::size_t len) {
        Bytes out(len);
        fill(out.data(), len);
        return out;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace qgp
