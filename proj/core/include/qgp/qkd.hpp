#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qgp/bytes.hpp"

namespace qgp::qkd {

enum class Basis : std::uint8_t { Rectilinear, Diagonal };

enum class EveMode : std::uint8_t { None, InterceptResend };

struct ChannelParams {
    double noise_flip_prob = 0.0;  // detector/channel bit flip at Bob
    double loss_prob = 0.0;        // pulse erasure
    EveMode eve_mode = EveMode::None;
    double intercept_prob = 0.0;   // used when eve_mode == InterceptResend

    void validate() const;
};

struct PulseRecord {
    std::uint8_t alice_bit;
    Basis alice_basis;
    bool eve_intercepted;
    Basis bob_basis;
    bool lost;             // bob_bit is meaningless when set
    std::uint8_t bob_bit;

    bool operator==(const PulseRecord&) const = default;
};

struct SiftedKey {
    std::vector<std::uint8_t> bits;
    std::vector<std::size_t> source_positions;

    std::size_t size() const { return bits.size(); }
};

struct SessionKeyMaterial {
    std::array<std::uint8_t, 16> key_id;
    std::vector<std::uint8_t> key_bits;  // one bit per entry
    double qber = 0.0;
    std::size_t leaked_bits = 0;
};

/// Simulates n BB84 pulses. Per pulse the draws happen in a fixed order
/// (Alice bit, Alice basis, Eve decision/measurement, loss, Bob basis,
/// Bob measurement, detector noise), so a seed pins the full transcript.
/// Eve measures in a uniform basis and resends her result in that basis;
/// loss strikes after her; Bob's cross-basis measurements are uniform;
/// noise flips Bob's recorded bit last.
std::vector<PulseRecord> exchange_pulses(std::size_t n_pulses, const ChannelParams& params,
                                         std::uint64_t rng_seed);

/// Keeps exactly the non-lost, basis-matching positions.
std::pair<SiftedKey, SiftedKey> sift(const std::vector<PulseRecord>& pulses);

struct QberEstimate {
    double qber;
    SiftedKey remaining_alice;
    SiftedKey remaining_bob;
    std::size_t sample_size;
};

/// Compares and discards a uniform sample of ceil(fraction * n) positions.
/// Throws std::invalid_argument when the sample would consume every bit or
/// the inputs are empty/misaligned.
QberEstimate estimate_qber(const SiftedKey& alice, const SiftedKey& bob, double sample_fraction,
                           std::uint64_t rng_seed);

struct ReconcileResult {
    std::vector<std::uint8_t> corrected_bob;
    std::size_t leaked_bits;
};

/// Single-pass parity reconciliation with block size clamp(ceil(0.73/qber),
/// 8, 1024) (whole key as one block at qber 0) and a binary search per
/// mismatched block. A final SHA3-256 transcript comparison catches blocks
/// with an even error count; nullopt signals that failure.
std::optional<ReconcileResult> reconcile(const std::vector<std::uint8_t>& alice_bits,
                                         const std::vector<std::uint8_t>& bob_bits, double qber,
                                         std::size_t* leaked_out = nullptr);

/// Output length l = floor(n * (1 - 2*h2(qber))) - leaked_bits - 64;
/// below 128 bits the round aborts (nullopt). Key bits come from
/// SHAKE256(amp_seed || packed key); the key id from
/// SHA3-256(amp_seed || "QGP-keyid").
std::optional<SessionKeyMaterial> privacy_amplify(const std::vector<std::uint8_t>& corrected_key,
                                                  double qber, std::size_t leaked_bits,
                                                  const std::array<std::uint8_t, 32>& amp_seed);

double binary_entropy(double x);

enum class ExchangeStatus : std::uint8_t {
    Ok,
    QberAlarm,        // estimated QBER above threshold
    InsufficientKey,  // too little material before or after distillation
    ReconcileFailed,
};

struct ExchangeOutcome {
    ExchangeStatus status = ExchangeStatus::InsufficientKey;
    double qber = 0.0;
    std::size_t sifted_bits = 0;
    std::optional<SessionKeyMaterial> key;
};

inline constexpr double kEstimateSampleFraction = 0.5;

/// Full round: exchange, sift, estimate (half the sifted bits), abort on
/// alarm, reconcile, privacy-amplify. Deterministic per seed.
ExchangeOutcome run_exchange(std::size_t n_pulses, const ChannelParams& params,
                             double qber_threshold, std::uint64_t rng_seed);

/// Bit vector <-> packed bytes (LSB-first within each byte).
Bytes pack_bits(const std::vector<std::uint8_t>& bits);

}  // namespace qgp::qkd
