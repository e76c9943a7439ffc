#include "qgp/qkd.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "qgp/rng.hpp"
#include "qgp/sha3.hpp"

namespace qgp::qkd {

void ChannelParams::validate() const {
    if (noise_flip_prob < 0.0 || noise_flip_prob > 1.0) {
        throw std::invalid_argument("ChannelParams: noise_flip_prob outside [0,1]");
    }
    if (loss_prob < 0.0 || loss_prob > 1.0) {
        throw std::invalid_argument("ChannelParams: loss_prob outside [0,1]");
    }
    if (eve_mode == EveMode::InterceptResend &&
        (intercept_prob < 0.0 || intercept_prob > 1.0)) {
        throw std::invalid_argument("ChannelParams: intercept_prob outside [0,1]");
    }
}

std::vector<PulseRecord> exchange_pulses(std::size_t n_pulses, const ChannelParams& params,
                                         std::uint64_t rng_seed) {
    if (n_pulses == 0) throw std::invalid_argument("exchange_pulses: n_pulses must be >= 1");
    params.validate();

    DeterministicRng rng(rng_seed);
    std::vector<PulseRecord> pulses;
    pulses.reserve(n_pulses);

    for (std::size_t i = 0; i < n_pulses; ++i) {
        PulseRecord rec{};
        rec.alice_bit = rng.bit();
        rec.alice_basis = static_cast<Basis>(rng.bit());

        std::uint8_t channel_bit = rec.alice_bit;
        Basis channel_basis = rec.alice_basis;
        rec.eve_intercepted = params.eve_mode == EveMode::InterceptResend &&
                              rng.bernoulli(params.intercept_prob);
        if (rec.eve_intercepted) {
            Basis eve_basis = static_cast<Basis>(rng.bit());
            std::uint8_t eve_bit = (eve_basis == channel_basis) ? channel_bit : rng.bit();
            channel_bit = eve_bit;
            channel_basis = eve_basis;
        }

        rec.lost = rng.bernoulli(params.loss_prob);
        rec.bob_basis = static_cast<Basis>(rng.bit());
        if (!rec.lost) {
            rec.bob_bit = (rec.bob_basis == channel_basis) ? channel_bit : rng.bit();
            if (rng.bernoulli(params.noise_flip_prob)) rec.bob_bit ^= 1;
        } else {
            rec.bob_bit = 0;
        }
        pulses.push_back(rec);
    }
    return pulses;
}

std::pair<SiftedKey, SiftedKey> sift(const std::vector<PulseRecord>& pulses) {
    SiftedKey alice, bob;
    for (std::size_t i = 0; i < pulses.size(); ++i) {
        const PulseRecord& p = pulses[i];
        if (p.lost || p.alice_basis != p.bob_basis) continue;
        alice.bits.push_back(p.alice_bit);
        alice.source_positions.push_back(i);
        bob.bits.push_back(p.bob_bit);
        bob.source_positions.push_back(i);
    }
    return {std::move(alice), std::move(bob)};
}

QberEstimate estimate_qber(const SiftedKey& alice, const SiftedKey& bob, double sample_fraction,
                           std::uint64_t rng_seed) {
    if (alice.size() == 0 || alice.size() != bob.size() ||
        alice.source_positions != bob.source_positions) {
        throw std::invalid_argument("estimate_qber: sifted keys empty or misaligned");
    }
    if (sample_fraction <= 0.0 || sample_fraction >= 1.0) {
        throw std::invalid_argument("estimate_qber: sample_fraction outside (0,1)");
    }
    const std::size_t n = alice.size();
    const std::size_t sample_size =
        static_cast<std::size_t>(std::ceil(sample_fraction * static_cast<double>(n)));
    if (sample_size >= n) {
        throw std::invalid_argument("estimate_qber: sample would consume all bits");
    }

    // Partial Fisher-Yates: the first sample_size entries become the sample.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    DeterministicRng rng(rng_seed);
    for (std::size_t i = 0; i < sample_size; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(order[i], order[j]);
    }

    std::vector<bool> sampled(n, false);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < sample_size; ++i) {
        sampled[order[i]] = true;
        if (alice.bits[order[i]] != bob.bits[order[i]]) ++mismatches;
    }

    QberEstimate est;
    est.qber = static_cast<double>(mismatches) / static_cast<double>(sample_size);
    est.sample_size = sample_size;
    for (std::size_t i = 0; i < n; ++i) {
        if (sampled[i]) continue;
        est.remaining_alice.bits.push_back(alice.bits[i]);
        est.remaining_alice.source_positions.push_back(alice.source_positions[i]);
        est.remaining_bob.bits.push_back(bob.bits[i]);
        est.remaining_bob.source_positions.push_back(bob.source_positions[i]);
    }
    return est;
}

namespace {

std::uint8_t parity_over(const std::vector<std::uint8_t>& bits,
                         const std::vector<std::uint32_t>& perm, std::size_t lo, std::size_t hi) {
    std::uint8_t p = 0;
    for (std::size_t i = lo; i < hi; ++i) p ^= bits[perm[i]];
    return p;
}

// Fixed reshuffle for pass > 0, derived from the pass index and key length
// so reconciliation stays seed-free and deterministic.
std::vector<std::uint32_t> pass_permutation(std::size_t n, std::size_t pass) {
    std::vector<std::uint32_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
    if (pass == 0) return perm;

    Bytes label = to_bytes("QGP-reconcile-pass");
    for (int b = 0; b < 8; ++b) label.push_back(static_cast<std::uint8_t>(pass >> (8 * b)));
    for (int b = 0; b < 8; ++b) label.push_back(static_cast<std::uint8_t>(n >> (8 * b)));
    Bytes stream = shake256(label, n * 8);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::uint64_t v = 0;
        std::memcpy(&v, stream.data() + 8 * i, 8);
        std::swap(perm[i], perm[v % (i + 1)]);
    }
    return perm;
}

// One parity pass over a virtual ordering: binary-search one error out of
// every odd-parity block. Returns parities revealed.
std::size_t parity_pass(const std::vector<std::uint8_t>& alice,
                        std::vector<std::uint8_t>& bob, const std::vector<std::uint32_t>& perm,
                        std::size_t block) {
    const std::size_t n = alice.size();
    std::size_t leaked = 0;
    for (std::size_t lo = 0; lo < n; lo += block) {
        const std::size_t hi = std::min(lo + block, n);
        leaked += 1;
        if (parity_over(alice, perm, lo, hi) == parity_over(bob, perm, lo, hi)) continue;
        std::size_t a = lo, b = hi;
        while (b - a > 1) {
            std::size_t mid = a + (b - a) / 2;
            leaked += 1;
            if (parity_over(alice, perm, a, mid) != parity_over(bob, perm, a, mid)) {
                b = mid;
            } else {
                a = mid;
            }
        }
        bob[perm[a]] ^= 1;
    }
    return leaked;
}

}  // namespace

std::optional<ReconcileResult> reconcile(const std::vector<std::uint8_t>& alice_bits,
                                         const std::vector<std::uint8_t>& bob_bits, double qber,
                                         std::size_t* leaked_out) {
    if (alice_bits.size() != bob_bits.size() || alice_bits.empty()) {
        throw std::invalid_argument("reconcile: keys empty or misaligned");
    }
    const std::size_t n = alice_bits.size();
    std::size_t block;
    if (qber <= 0.0) {
        block = n;
    } else {
        double raw = std::ceil(0.73 / qber);
        block = static_cast<std::size_t>(std::clamp(raw, 8.0, 1024.0));
    }

    constexpr std::size_t kMaxPasses = 16;

    ReconcileResult res;
    res.corrected_bob = bob_bits;
    res.leaked_bits = 0;

    const auto alice_hash = sha3_256(pack_bits(alice_bits));
    for (std::size_t pass = 0; pass < kMaxPasses; ++pass) {
        auto perm = pass_permutation(n, pass);
        res.leaked_bits += parity_pass(alice_bits, res.corrected_bob, perm, block);
        if (sha3_256(pack_bits(res.corrected_bob)) == alice_hash) {
            if (leaked_out != nullptr) *leaked_out = res.leaked_bits;
            return res;
        }
    }
    // Error patterns even across every tried partition stay invisible to
    // parity; report the failure instead of shipping a bad key.
    if (leaked_out != nullptr) *leaked_out = res.leaked_bits;
    return std::nullopt;
}

double binary_entropy(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

std::optional<SessionKeyMaterial> privacy_amplify(const std::vector<std::uint8_t>& corrected_key,
                                                  double qber, std::size_t leaked_bits,
                                                  const std::array<std::uint8_t, 32>& amp_seed) {
    const double n = static_cast<double>(corrected_key.size());
    const double secrecy = n * (1.0 - 2.0 * binary_entropy(qber));
    const double length = std::floor(secrecy) - static_cast<double>(leaked_bits) - 64.0;
    if (length < 128.0) return std::nullopt;
    const std::size_t out_bits = static_cast<std::size_t>(length);

    SessionKeyMaterial material;
    material.qber = qber;
    material.leaked_bits = leaked_bits;

    Bytes xof_input(amp_seed.begin(), amp_seed.end());
    Bytes packed = pack_bits(corrected_key);
    xof_input.insert(xof_input.end(), packed.begin(), packed.end());
    Bytes stream = shake256(xof_input, (out_bits + 7) / 8);
    material.key_bits.resize(out_bits);
    for (std::size_t i = 0; i < out_bits; ++i) {
        material.key_bits[i] = (stream[i / 8] >> (i % 8)) & 1;
    }

    Bytes id_input(amp_seed.begin(), amp_seed.end());
    Bytes tag = to_bytes("QGP-keyid");
    id_input.insert(id_input.end(), tag.begin(), tag.end());
    auto id_hash = sha3_256(id_input);
    std::copy_n(id_hash.begin(), material.key_id.size(), material.key_id.begin());
    return material;
}

ExchangeOutcome run_exchange(std::size_t n_pulses, const ChannelParams& params,
                             double qber_threshold, std::uint64_t rng_seed) {
    if (qber_threshold <= 0.0 || qber_threshold >= 0.5) {
        throw std::invalid_argument("run_exchange: qber_threshold outside (0, 0.5)");
    }

    ExchangeOutcome outcome;
    auto pulses = exchange_pulses(n_pulses, params, rng_seed);
    auto [alice, bob] = sift(pulses);
    outcome.sifted_bits = alice.size();

    const std::size_t sample_size = static_cast<std::size_t>(
        std::ceil(kEstimateSampleFraction * static_cast<double>(alice.size())));
    if (alice.size() < 2 || sample_size >= alice.size()) {
        outcome.status = ExchangeStatus::InsufficientKey;
        return outcome;
    }

    // Stage seeds derive from the round seed so one u64 pins the round.
    auto est = estimate_qber(alice, bob, kEstimateSampleFraction, rng_seed ^ 0x9e3779b97f4a7c15ULL);
    outcome.qber = est.qber;
    if (est.qber > qber_threshold) {
        outcome.status = ExchangeStatus::QberAlarm;
        return outcome;
    }

    auto reconciled = reconcile(est.remaining_alice.bits, est.remaining_bob.bits, est.qber);
    if (!reconciled.has_value()) {
        outcome.status = ExchangeStatus::ReconcileFailed;
        return outcome;
    }

    std::array<std::uint8_t, 32> amp_seed{};
    std::uint8_t seed_input[16];
    for (int i = 0; i < 8; ++i) {
        seed_input[i] = static_cast<std::uint8_t>(rng_seed >> (8 * i));
        seed_input[8 + i] = static_cast<std::uint8_t>("QGP-amp\0"[i]);
    }
    Bytes amp = shake256(ByteView(seed_input, sizeof seed_input), amp_seed.size());
    std::copy(amp.begin(), amp.end(), amp_seed.begin());

    auto material = privacy_amplify(reconciled->corrected_bob, est.qber, reconciled->leaked_bits,
                                    amp_seed);
    if (!material.has_value()) {
        outcome.status = ExchangeStatus::InsufficientKey;
        return outcome;
    }
    outcome.status = ExchangeStatus::Ok;
    outcome.key = std::move(material);
    return outcome;
}

Bytes pack_bits(const std::vector<std::uint8_t>& bits) {
    Bytes out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        out[i / 8] |= static_cast<std::uint8_t>((bits[i] & 1) << (i % 8));
    }
    return out;
}

}  // namespace qgp::qkd
