#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qgp/bytes.hpp"
#include "qgp/envelope.hpp"
#include "qgp/qkd.hpp"

namespace qgp::netsim {

enum class AdversaryKind : std::uint8_t { None, TamperByte, ReplayEnvelope };

struct ClassicalAdversary {
    AdversaryKind kind = AdversaryKind::None;
    std::size_t message_index = 0;
    std::size_t byte_offset = 0;  // TamperByte; reduced modulo envelope size
};

struct ScenarioSpec {
    std::uint64_t seed = 0;
    std::size_t n_pulses = 1;
    qkd::ChannelParams channel;
    double qber_threshold = 0.11;
    std::vector<Bytes> messages;
    ClassicalAdversary classical_adversary;
    bool layer_qkd = true;
    bool layer_kyber = false;

    void validate() const;
};

struct MessageReport {
    bool delivered = false;
    std::optional<codec::OpenError> error;  // open-side rejection, when any

    bool operator==(const MessageReport&) const = default;
};

struct ScenarioReport {
    int report_version = 1;
    std::uint64_t seed = 0;
    double qber = 0.0;
    bool alarm_triggered = false;
    std::uint64_t key_bits_delivered = 0;
    std::vector<MessageReport> per_message;  // replay adds one extra entry
    std::vector<std::string> detection_events;
};

/// Two endpoints over an in-process byte channel: layer-0 exchanges feed the
/// key pool (one per message when the QKD layer is on, stopping at the first
/// alarm), Alice seals, the adversary may tamper with or duplicate envelope
/// bytes in flight, Bob opens against the pool and a shared replay registry.
/// Long-term keys, nonces, and stage seeds all derive from spec.seed, so
/// equal specs produce byte-identical reports.
ScenarioReport run_scenario(const ScenarioSpec& spec);

/// run_scenario specialized to the duplicate-delivery adversary: the
/// targeted envelope reaches Bob twice and the report carries the extra
/// per_message entry (ReplayDetected on the copy). Without a replay
/// adversary the report is identical to a plain run.
ScenarioReport replay_attack_check(const ScenarioSpec& spec);

/// Same execution, reported as per-message stack transitions (layer-0 key
/// fetch, sign, compress, encrypt layers, transport, and the inverse path).
std::vector<std::vector<std::string>> layer_trace(const ScenarioSpec& spec);

std::string spec_to_json(const ScenarioSpec& spec);
ScenarioSpec spec_from_json(const std::string& text);
std::string report_to_json(const ScenarioReport& report);

}  // namespace qgp::netsim
