#include <doctest.h>

#include <algorithm>

#include "qgp/netsim.hpp"

using namespace qgp;
using namespace qgp::netsim;

namespace {

ScenarioSpec quiet_spec() {
    ScenarioSpec spec;
    spec.seed = 2024;
    spec.n_pulses = 50000;
    spec.channel.noise_flip_prob = 0.01;
    spec.qber_threshold = 0.11;
    spec.messages = {to_bytes("first"), to_bytes("second"), to_bytes("third")};
    spec.layer_qkd = true;
    spec.layer_kyber = false;
    return spec;
}

}  // namespace

TEST_CASE("quiet channel delivers every message") {
    auto spec = quiet_spec();
    auto report = run_scenario(spec);
    CHECK(!report.alarm_triggered);
    CHECK(report.qber < 0.05);
    REQUIRE(report.per_message.size() == 3);
    for (const auto& m : report.per_message) {
        CHECK(m.delivered);
        CHECK(!m.error.has_value());
    }
    CHECK(report.key_bits_delivered == 3 * 256);
}

TEST_CASE("both layers deliver too") {
    auto spec = quiet_spec();
    spec.layer_kyber = true;
    auto report = run_scenario(spec);
    for (const auto& m : report.per_message) CHECK(m.delivered);
}

TEST_CASE("full intercept-resend trips the alarm and stops delivery") {
    auto spec = quiet_spec();
    spec.channel.noise_flip_prob = 0.0;
    spec.channel.eve_mode = qkd::EveMode::InterceptResend;
    spec.channel.intercept_prob = 1.0;
    auto report = run_scenario(spec);
    CHECK(report.alarm_triggered);
    CHECK(report.qber == doctest::Approx(0.25).epsilon(0.15));
    CHECK(report.key_bits_delivered == 0);
    REQUIRE(report.per_message.size() == 3);
    for (const auto& m : report.per_message) CHECK(!m.delivered);
    CHECK(std::count(report.detection_events.begin(), report.detection_events.end(),
                     "QBER_ALARM") == 1);
}

TEST_CASE("tampered byte rejects exactly the targeted message") {
    auto spec = quiet_spec();
    spec.classical_adversary.kind = AdversaryKind::TamperByte;
    spec.classical_adversary.message_index = 0;
    spec.classical_adversary.byte_offset = 100;
    auto report = run_scenario(spec);
    REQUIRE(report.per_message.size() == 3);
    CHECK(!report.per_message[0].delivered);
    REQUIRE(report.per_message[0].error.has_value());
    CHECK(report.per_message[1].delivered);
    CHECK(report.per_message[2].delivered);
}

TEST_CASE("replayed envelope is delivered once and flagged once") {
    auto spec = quiet_spec();
    spec.classical_adversary.kind = AdversaryKind::ReplayEnvelope;
    spec.classical_adversary.message_index = 1;
    auto report = run_scenario(spec);
    REQUIRE(report.per_message.size() == 4);  // 3 messages + the duplicate
    CHECK(report.per_message[0].delivered);
    CHECK(report.per_message[1].delivered);
    CHECK(!report.per_message[2].delivered);  // the duplicate
    REQUIRE(report.per_message[2].error.has_value());
    CHECK(*report.per_message[2].error == codec::OpenError::ReplayDetected);
    CHECK(report.per_message[3].delivered);
}

TEST_CASE("kyber-only replay is caught via nonce identity") {
    auto spec = quiet_spec();
    spec.layer_qkd = false;
    spec.layer_kyber = true;
    spec.classical_adversary.kind = AdversaryKind::ReplayEnvelope;
    spec.classical_adversary.message_index = 0;
    auto report = run_scenario(spec);
    REQUIRE(report.per_message.size() == 4);
    CHECK(report.per_message[0].delivered);
    CHECK(!report.per_message[1].delivered);
    CHECK(*report.per_message[1].error == codec::OpenError::ReplayDetected);
}

TEST_CASE("no replay adversary means an identical plain report") {
    auto spec = quiet_spec();
    auto plain = report_to_json(run_scenario(spec));
    spec.classical_adversary.kind = AdversaryKind::None;
    auto same = report_to_json(replay_attack_check(spec));
    CHECK(plain == same);
}

TEST_CASE("replay_attack_check reports the duplicate") {
    auto spec = quiet_spec();
    spec.classical_adversary.kind = AdversaryKind::ReplayEnvelope;
    spec.classical_adversary.message_index = 0;
    auto report = replay_attack_check(spec);
    REQUIRE(report.per_message.size() == 4);
    CHECK(report.per_message[0].delivered);
    CHECK(*report.per_message[1].error == codec::OpenError::ReplayDetected);
}

TEST_CASE("reports are byte-identical across runs") {
    auto specs = std::vector<ScenarioSpec>{quiet_spec()};
    specs.push_back(quiet_spec());
    specs.back().channel.eve_mode = qkd::EveMode::InterceptResend;
    specs.back().channel.intercept_prob = 1.0;
    specs.push_back(quiet_spec());
    specs.back().classical_adversary.kind = AdversaryKind::TamperByte;
    specs.back().classical_adversary.message_index = 2;
    specs.back().classical_adversary.byte_offset = 7;
    for (const auto& spec : specs) {
        CHECK(report_to_json(run_scenario(spec)) == report_to_json(run_scenario(spec)));
    }
}

TEST_CASE("layer traces") {
    SUBCASE("qkd+kyber fetches layer-0 material before sealing") {
        auto spec = quiet_spec();
        spec.layer_kyber = true;
        auto traces = layer_trace(spec);
        REQUIRE(traces.size() == 3);
        for (const auto& trace : traces) {
            auto fetch = std::find(trace.begin(), trace.end(), "layer0:key_fetch");
            auto encrypt = std::find(trace.begin(), trace.end(), "qkd_encrypt");
            REQUIRE(fetch != trace.end());
            REQUIRE(encrypt != trace.end());
            CHECK(fetch < encrypt);
            CHECK(std::find(trace.begin(), trace.end(), "kyber_wrap") != trace.end());
        }
    }
    SUBCASE("kyber-only has no layer-0 entries") {
        auto spec = quiet_spec();
        spec.layer_qkd = false;
        spec.layer_kyber = true;
        auto traces = layer_trace(spec);
        for (const auto& trace : traces) {
            for (const auto& event : trace) CHECK(event.find("layer0") == std::string::npos);
        }
    }
    SUBCASE("alarm scenario shows layer-0 abort and no seal attempts") {
        auto spec = quiet_spec();
        spec.channel.eve_mode = qkd::EveMode::InterceptResend;
        spec.channel.intercept_prob = 1.0;
        auto traces = layer_trace(spec);
        for (const auto& trace : traces) {
            REQUIRE(trace.size() == 1);
            CHECK(trace[0] == "layer0:abort");
        }
    }
}

TEST_CASE("spec json roundtrip") {
    auto spec = quiet_spec();
    spec.layer_kyber = true;
    spec.classical_adversary.kind = AdversaryKind::TamperByte;
    spec.classical_adversary.message_index = 1;
    spec.classical_adversary.byte_offset = 13;
    auto parsed = spec_from_json(spec_to_json(spec));
    CHECK(parsed.seed == spec.seed);
    CHECK(parsed.n_pulses == spec.n_pulses);
    CHECK(parsed.messages == spec.messages);
    CHECK(parsed.layer_qkd == spec.layer_qkd);
    CHECK(parsed.layer_kyber == spec.layer_kyber);
    CHECK(parsed.classical_adversary.kind == spec.classical_adversary.kind);
    CHECK(parsed.channel.noise_flip_prob == spec.channel.noise_flip_prob);
    // identical reports from the parsed spec
    CHECK(report_to_json(run_scenario(parsed)) == report_to_json(run_scenario(spec)));
}

TEST_CASE("spec validation") {
    auto spec = quiet_spec();
    spec.classical_adversary.kind = AdversaryKind::TamperByte;
    spec.classical_adversary.message_index = 99;
    CHECK_THROWS_AS(run_scenario(spec), std::invalid_argument);

    auto no_layers = quiet_spec();
    no_layers.layer_qkd = false;
    no_layers.layer_kyber = false;
    CHECK_THROWS_AS(run_scenario(no_layers), std::invalid_argument);

    auto bad_threshold = quiet_spec();
    bad_threshold.qber_threshold = 0.7;
    CHECK_THROWS_AS(run_scenario(bad_threshold), std::invalid_argument);
}
