#include "qgp/netsim.hpp"

#include <json.hpp>

#include <stdexcept>

#include "qgp/dilithium3.hpp"
#include "qgp/key_pool.hpp"
#include "qgp/kyber768.hpp"
#include "qgp/sha3.hpp"

namespace qgp::netsim {

using nlohmann::json;

void ScenarioSpec::validate() const {
    if (n_pulses == 0) throw std::invalid_argument("scenario: n_pulses must be >= 1");
    channel.validate();
    if (qber_threshold <= 0.0 || qber_threshold >= 0.5) {
        throw std::invalid_argument("scenario: qber_threshold outside (0, 0.5)");
    }
    if (!layer_qkd && !layer_kyber) {
        throw std::invalid_argument("scenario: at least one of the QKD/Kyber layers is required");
    }
    if (classical_adversary.kind != AdversaryKind::None &&
        classical_adversary.message_index >= messages.size()) {
        throw std::invalid_argument("scenario: adversary message_index out of range");
    }
}

namespace {

Bytes derive(std::uint64_t seed, std::string_view label, std::size_t index, std::size_t len) {
    Bytes input = to_bytes(label);
    for (int b = 0; b < 8; ++b) input.push_back(static_cast<std::uint8_t>(seed >> (8 * b)));
    for (int b = 0; b < 8; ++b) input.push_back(static_cast<std::uint8_t>(index >> (8 * b)));
    return shake256(input, len);
}

std::uint64_t derive_u64(std::uint64_t seed, std::string_view label, std::size_t index) {
    Bytes b = derive(seed, label, index, 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
}

struct Trace {
    std::vector<std::vector<std::string>>* sink = nullptr;
    std::vector<std::string>* current = nullptr;

    void event(const std::string& s) {
        if (current != nullptr) current->push_back(s);
    }
};

ScenarioReport run_impl(const ScenarioSpec& spec, std::vector<std::vector<std::string>>* traces) {
    spec.validate();

    ScenarioReport report;
    report.seed = spec.seed;

    // Long-term endpoint keys, pinned by the scenario seed.
    auto signer = dilithium3::sig_keygen(derive(spec.seed, "QGP-scenario-sig", 0, 32));
    auto recipient = kyber768::kem_keygen(derive(spec.seed, "QGP-scenario-kem", 0, 64));

    keysvc::KeyPool pool;
    if (traces != nullptr) traces->assign(spec.messages.size(), {});

    // Layer 0: one exchange per message, halting at the first alarm.
    if (spec.layer_qkd) {
        const std::size_t rounds = std::max<std::size_t>(1, spec.messages.size());
        bool first = true;
        for (std::size_t i = 0; i < rounds; ++i) {
            auto outcome = qkd::run_exchange(spec.n_pulses, spec.channel, spec.qber_threshold,
                                             derive_u64(spec.seed, "QGP-scenario-l0", i));
            if (first) {
                report.qber = outcome.qber;
                first = false;
            }
            switch (outcome.status) {
                case qkd::ExchangeStatus::Ok:
                    pool.ingest(*outcome.key);
                    break;
                case qkd::ExchangeStatus::QberAlarm:
                    report.alarm_triggered = true;
                    pool.raise_alarm(outcome.qber);
                    report.detection_events.push_back("QBER_ALARM");
                    break;
                case qkd::ExchangeStatus::InsufficientKey:
                    report.detection_events.push_back("KEY_EXCHANGE_FAILED:INSUFFICIENT_KEY");
                    break;
                case qkd::ExchangeStatus::ReconcileFailed:
                    report.detection_events.push_back("KEY_EXCHANGE_FAILED:RECONCILE_FAILURE");
                    break;
            }
            if (report.alarm_triggered) break;
        }
    }

    codec::ReplayRegistry registry;
    auto pool_lookup = [&pool](const keysvc::KeyId& id) -> std::optional<Bytes> {
        keysvc::KeyRequest req;
        req.op = keysvc::Op::GetKeyById;
        req.requester = "bob";
        req.key_id = id;
        auto resp = pool.serve(req);
        if (!resp.ok) return std::nullopt;
        return resp.key;
    };

    Trace trace;
    trace.sink = traces;

    for (std::size_t idx = 0; idx < spec.messages.size(); ++idx) {
        if (traces != nullptr) trace.current = &(*traces)[idx];
        MessageReport msg_report;

        // Alice's side: fetch layer-0 material, then seal.
        codec::SealContext ctx;
        ctx.signer_secret_key = signer.secret_key;
        if (spec.layer_kyber) ctx.recipient_kem_public = recipient.public_key;

        bool seal_possible = true;
        if (spec.layer_qkd) {
            if (report.alarm_triggered) {
                trace.event("layer0:abort");
                seal_possible = false;
            } else {
                keysvc::KeyRequest req;
                req.op = keysvc::Op::GetKey;
                req.requester = "alice";
                req.peer = "bob";
                req.size_bits = 256;
                auto resp = pool.serve(req);
                if (resp.ok) {
                    trace.event("layer0:key_fetch");
                    report.key_bits_delivered += resp.size_bits;
                    codec::SessionKeyRef session;
                    session.id = resp.key_id;
                    session.key = resp.key;
                    ctx.session_key = session;
                } else {
                    trace.event("layer0:unavailable");
                    report.detection_events.push_back(
                        "NO_SESSION_KEY:" + std::to_string(idx) + ":" +
                        keysvc::error_code_name(resp.code));
                    seal_possible = false;
                }
            }
        }

        if (!seal_possible) {
            report.per_message.push_back(msg_report);
            if (traces != nullptr) trace.current = nullptr;
            continue;
        }

        trace.event("app:hash_sign");
        trace.event("compress");
        if (spec.layer_qkd) trace.event("qkd_encrypt");
        if (spec.layer_kyber) trace.event("kyber_wrap");
        codec::XofNonceSource nonces(derive(spec.seed, "QGP-scenario-nonce", idx, 32));
        Bytes envelope = codec::seal(spec.messages[idx], ctx, nonces);
        trace.event("transport:send");

        // The classical channel, where the adversary acts.
        std::vector<Bytes> deliveries;
        Bytes in_flight = envelope;
        if (spec.classical_adversary.kind == AdversaryKind::TamperByte &&
            spec.classical_adversary.message_index == idx) {
            in_flight[spec.classical_adversary.byte_offset % in_flight.size()] ^= 0xFF;
            deliveries.push_back(in_flight);
        } else if (spec.classical_adversary.kind == AdversaryKind::ReplayEnvelope &&
                   spec.classical_adversary.message_index == idx) {
            deliveries.push_back(in_flight);
            deliveries.push_back(in_flight);  // duplicate copy on the wire
        } else {
            deliveries.push_back(in_flight);
        }

        for (std::size_t copy = 0; copy < deliveries.size(); ++copy) {
            trace.event("transport:recv");
            if (spec.layer_kyber) trace.event("kyber_unwrap");
            if (spec.layer_qkd) trace.event("qkd_decrypt");
            auto outcome = codec::open(deliveries[copy],
                                       spec.layer_kyber ? ByteView(recipient.secret_key)
                                                        : ByteView{},
                                       pool_lookup, signer.public_key, registry);
            MessageReport entry;
            // delivered means byte-exact receipt, not merely a clean open
            entry.delivered = outcome.ok() && *outcome.message == spec.messages[idx];
            if (outcome.ok() && !entry.delivered) {
                report.detection_events.push_back("INTEGRITY_MISMATCH:" + std::to_string(idx));
            }
            if (entry.delivered) {
                trace.event("decompress");
                trace.event("app:verify");
            } else if (!outcome.ok()) {
                entry.error = outcome.error;
                report.detection_events.push_back("OPEN_ERROR:" + std::to_string(idx) + ":" +
                                                  codec::open_error_name(outcome.error));
            }
            report.per_message.push_back(entry);
        }
        if (traces != nullptr) trace.current = nullptr;
    }

    return report;
}

}  // namespace

ScenarioReport run_scenario(const ScenarioSpec& spec) { return run_impl(spec, nullptr); }

ScenarioReport replay_attack_check(const ScenarioSpec& spec) { return run_impl(spec, nullptr); }

std::vector<std::vector<std::string>> layer_trace(const ScenarioSpec& spec) {
    std::vector<std::vector<std::string>> traces;
    run_impl(spec, &traces);
    return traces;
}

namespace {

std::string adversary_name(AdversaryKind kind) {
    switch (kind) {
        case AdversaryKind::None: return "none";
        case AdversaryKind::TamperByte: return "tamper_byte";
        case AdversaryKind::ReplayEnvelope: return "replay_envelope";
    }
    return "none";
}

}  // namespace

std::string spec_to_json(const ScenarioSpec& spec) {
    json doc;
    doc["seed"] = spec.seed;
    doc["n_pulses"] = spec.n_pulses;
    doc["channel"] = {
        {"noise_flip_prob", spec.channel.noise_flip_prob},
        {"loss_prob", spec.channel.loss_prob},
        {"eve_mode",
         spec.channel.eve_mode == qkd::EveMode::InterceptResend ? "intercept_resend" : "none"},
        {"intercept_prob", spec.channel.intercept_prob},
    };
    doc["qber_threshold"] = spec.qber_threshold;
    json msgs = json::array();
    for (const auto& m : spec.messages) msgs.push_back(base64_encode(m));
    doc["messages"] = msgs;
    doc["classical_adversary"] = {
        {"kind", adversary_name(spec.classical_adversary.kind)},
        {"message_index", spec.classical_adversary.message_index},
        {"byte_offset", spec.classical_adversary.byte_offset},
    };
    json layers = json::array();
    if (spec.layer_qkd) layers.push_back("qkd");
    if (spec.layer_kyber) layers.push_back("kyber");
    doc["layers"] = layers;
    return doc.dump(2);
}

ScenarioSpec spec_from_json(const std::string& text) {
    json doc = json::parse(text);
    ScenarioSpec spec;
    spec.seed = doc.at("seed").get<std::uint64_t>();
    spec.n_pulses = doc.at("n_pulses").get<std::size_t>();
    const auto& ch = doc.at("channel");
    spec.channel.noise_flip_prob = ch.value("noise_flip_prob", 0.0);
    spec.channel.loss_prob = ch.value("loss_prob", 0.0);
    spec.channel.intercept_prob = ch.value("intercept_prob", 0.0);
    std::string eve = ch.value("eve_mode", "none");
    if (eve == "intercept_resend") {
        spec.channel.eve_mode = qkd::EveMode::InterceptResend;
    } else if (eve == "none") {
        spec.channel.eve_mode = qkd::EveMode::None;
    } else {
        throw std::invalid_argument("scenario: unknown eve_mode " + eve);
    }
    spec.qber_threshold = doc.value("qber_threshold", 0.11);
    for (const auto& m : doc.value("messages", json::array())) {
        spec.messages.push_back(base64_decode(m.get<std::string>()));
    }
    if (doc.contains("classical_adversary")) {
        const auto& adv = doc["classical_adversary"];
        std::string kind = adv.value("kind", "none");
        if (kind == "tamper_byte") {
            spec.classical_adversary.kind = AdversaryKind::TamperByte;
        } else if (kind == "replay_envelope") {
            spec.classical_adversary.kind = AdversaryKind::ReplayEnvelope;
        } else if (kind == "none") {
            spec.classical_adversary.kind = AdversaryKind::None;
        } else {
            throw std::invalid_argument("scenario: unknown adversary kind " + kind);
        }
        spec.classical_adversary.message_index = adv.value("message_index", std::size_t{0});
        spec.classical_adversary.byte_offset = adv.value("byte_offset", std::size_t{0});
    }
    spec.layer_qkd = false;
    spec.layer_kyber = false;
    for (const auto& layer : doc.value("layers", json::array({"qkd"}))) {
        std::string name = layer.get<std::string>();
        if (name == "qkd") {
            spec.layer_qkd = true;
        } else if (name == "kyber") {
            spec.layer_kyber = true;
        } else {
            throw std::invalid_argument("scenario: unknown layer " + name);
        }
    }
    return spec;
}

std::string report_to_json(const ScenarioReport& report) {
    json doc;
    doc["report_version"] = report.report_version;
    doc["seed"] = report.seed;
    doc["qber"] = report.qber;
    doc["alarm_triggered"] = report.alarm_triggered;
    doc["key_bits_delivered"] = report.key_bits_delivered;
    json msgs = json::array();
    for (const auto& m : report.per_message) {
        json entry;
        entry["delivered"] = m.delivered;
        if (m.error.has_value()) entry["error"] = codec::open_error_name(*m.error);
        msgs.push_back(entry);
    }
    doc["per_message"] = msgs;
    doc["detection_events"] = report.detection_events;
    return doc.dump(2);
}

}  // namespace qgp::netsim
