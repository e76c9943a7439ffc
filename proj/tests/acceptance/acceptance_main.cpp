// Acceptance suite: every release gate runs here, one verdict line per
// criterion, nonzero exit when anything fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../kat_file.hpp"
#include "qgp/dilithium3.hpp"
#include "qgp/drbg.hpp"
#include "qgp/envelope.hpp"
#include "qgp/key_pool.hpp"
#include "qgp/kyber768.hpp"
#include "qgp/netsim.hpp"
#include "qgp/qkd.hpp"
#include "qgp/shor.hpp"

using namespace qgp;

namespace {

int g_failures = 0;

void verdict(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %d. %s — %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

// --- 1. QBER law over the (noise, intercept) grid --------------------------

void criterion_qber_law() {
    const double noises[] = {0.0, 0.02, 0.05};
    const double intercepts[] = {0.0, 0.5, 1.0};
    const std::size_t pulses = 100000;
    bool pass = true;
    std::string detail;
    std::uint64_t seed = 42;
    double eve_cell_rate = 0.0;

    for (double p : noises) {
        for (double q : intercepts) {
            qkd::ChannelParams params;
            params.noise_flip_prob = p;
            params.eve_mode = q > 0 ? qkd::EveMode::InterceptResend : qkd::EveMode::None;
            params.intercept_prob = q;
            auto [alice, bob] = qkd::sift(qkd::exchange_pulses(pulses, params, seed++));
            std::size_t mismatch = 0;
            for (std::size_t i = 0; i < alice.size(); ++i) {
                if (alice.bits[i] != bob.bits[i]) ++mismatch;
            }
            double rate = static_cast<double>(mismatch) / static_cast<double>(alice.size());
            double expect = p * (1.0 - q / 2.0) + q / 4.0;
            double sigma = std::sqrt(std::max(expect * (1.0 - expect), 1e-12) /
                                     static_cast<double>(alice.size()));
            if (std::abs(rate - expect) > 3.0 * sigma + 1e-12) {
                pass = false;
                detail += " cell(" + std::to_string(p) + "," + std::to_string(q) + ") off;";
            }
            if (p == 0.0 && q == 1.0) eve_cell_rate = rate;
        }
    }
    if (std::abs(eve_cell_rate - 0.25) > 0.01) {
        pass = false;
        detail += " (0,1) cell outside 0.25 +/- 0.01;";
    }
    if (detail.empty()) {
        detail = "9 grid cells within 3 binomial sigma, intercept cell at " +
                 std::to_string(eve_cell_rate);
    }
    verdict(1, "QBER law Q(p,q) = p(1-q/2) + q/4 at 100k pulses", pass, detail);
}

// --- 2. Eavesdropping detection / false alarm rates ------------------------

void criterion_detection() {
    const double threshold = 0.11;
    const std::size_t pulses = 6000;  // ~3000 sifted bits >= 2000
    int detected = 0, false_alarms = 0;
    std::size_t min_sifted = SIZE_MAX;

    for (std::uint64_t run = 0; run < 1000; ++run) {
        qkd::ChannelParams eve;
        eve.eve_mode = qkd::EveMode::InterceptResend;
        eve.intercept_prob = 1.0;
        auto outcome = qkd::run_exchange(pulses, eve, threshold, 10000 + run);
        min_sifted = std::min(min_sifted, outcome.sifted_bits);
        if (outcome.status == qkd::ExchangeStatus::QberAlarm) ++detected;
    }
    for (std::uint64_t run = 0; run < 1000; ++run) {
        qkd::ChannelParams quiet;
        quiet.noise_flip_prob = 0.02;
        auto outcome = qkd::run_exchange(pulses, quiet, threshold, 20000 + run);
        if (outcome.status == qkd::ExchangeStatus::QberAlarm) ++false_alarms;
    }
    bool pass = detected >= 990 && false_alarms <= 10 && min_sifted >= 2000;
    verdict(2, "detection at threshold 0.11",
            pass,
            "intercept-resend detected " + std::to_string(detected) +
                "/1000, false alarms " + std::to_string(false_alarms) + "/1000, min sifted " +
                std::to_string(min_sifted));
}

// --- 3. PQC known-answer and mutation conformance ---------------------------

void criterion_pqc() {
    bool pass = true;
    std::string detail;

    // Kyber768 KATs
    auto kyber_records = kat::load(std::string(QGP_KAT_DIR) + "/kyber768.rsp");
    int kyber_ok = 0;
    for (const auto& rec : kyber_records) {
        NistCtrDrbg drbg(kat::hex(rec, "seed"));
        Bytes d = drbg.generate(32);
        Bytes z = drbg.generate(32);
        auto kp = kyber768::kem_keygen(concat(d, z));
        Bytes m = drbg.generate(32);
        auto enc = kyber768::encaps(kp.public_key, m);
        auto dec = kyber768::decaps(kp.secret_key, enc.ciphertext);
        if (kp.public_key == kat::hex(rec, "pk") && kp.secret_key == kat::hex(rec, "sk") &&
            enc.ciphertext == kat::hex(rec, "ct") &&
            Bytes(enc.shared_secret.begin(), enc.shared_secret.end()) == kat::hex(rec, "ss") &&
            dec == enc.shared_secret) {
            ++kyber_ok;
        }
    }
    if (kyber_ok != 100) {
        pass = false;
        detail += "kyber768 KAT " + std::to_string(kyber_ok) + "/100; ";
    }

    // Dilithium3 KATs
    auto dil_records = kat::load(std::string(QGP_KAT_DIR) + "/dilithium3.rsp");
    int dil_ok = 0;
    for (const auto& rec : dil_records) {
        NistCtrDrbg drbg(kat::hex(rec, "seed"));
        Bytes zeta = drbg.generate(32);
        auto kp = dilithium3::sig_keygen(zeta);
        Bytes msg = kat::hex(rec, "msg");
        Bytes sig = dilithium3::sign(kp.secret_key, msg);
        if (kp.public_key == kat::hex(rec, "pk") && kp.secret_key == kat::hex(rec, "sk") &&
            concat(sig, msg) == kat::hex(rec, "sm") && dilithium3::verify(kp.public_key, msg, sig)) {
            ++dil_ok;
        }
    }
    if (dil_ok != 100) {
        pass = false;
        detail += "dilithium3 KAT " + std::to_string(dil_ok) + "/100; ";
    }

    // 1000-trial roundtrip and bit-flip rejection
    std::mt19937_64 rng(333);
    auto kp = dilithium3::sig_keygen(Bytes(32, 0x5A));
    int roundtrips = 0, rejections = 0, trials = 0;
    for (int i = 0; i < 1000; ++i) {
        Bytes msg(1 + rng() % 64);
        for (auto& b : msg) b = static_cast<std::uint8_t>(rng());
        Bytes sig = dilithium3::sign(kp.secret_key, msg);
        if (dilithium3::verify(kp.public_key, msg, sig)) ++roundtrips;
        ++trials;

        Bytes bad_msg = msg;
        std::size_t mbit = rng() % (msg.size() * 8);
        bad_msg[mbit / 8] ^= static_cast<std::uint8_t>(1u << (mbit % 8));
        if (!dilithium3::verify(kp.public_key, bad_msg, sig)) ++rejections;
        Bytes bad_sig = sig;
        std::size_t sbit = rng() % (sig.size() * 8);
        bad_sig[sbit / 8] ^= static_cast<std::uint8_t>(1u << (sbit % 8));
        if (!dilithium3::verify(kp.public_key, msg, bad_sig)) ++rejections;
    }
    if (roundtrips != 1000 || rejections != 2000) {
        pass = false;
        detail += "sign/verify roundtrips " + std::to_string(roundtrips) + "/1000, rejections " +
                  std::to_string(rejections) + "/2000; ";
    }
    if (detail.empty()) {
        detail = "kyber768 100/100, dilithium3 100/100, 1000 roundtrips, 2000 bit-flip rejections";
    }
    verdict(3, "PQC known-answer conformance", pass, detail);
}

// --- 4. Envelope tamper totality and roundtrip ------------------------------

void criterion_envelope() {
    auto signer = dilithium3::sig_keygen(Bytes(32, 0x11));
    auto recipient = kyber768::kem_keygen(Bytes(64, 0x22));
    codec::SessionKeyRef session;
    session.id.fill(0x33);
    session.key = Bytes(32, 0x44);

    auto make_ctx = [&](bool qkd, bool kyber) {
        codec::SealContext ctx;
        ctx.signer_secret_key = signer.secret_key;
        if (qkd) ctx.session_key = session;
        if (kyber) ctx.recipient_kem_public = recipient.public_key;
        return ctx;
    };
    codec::KeyLookup lookup = [&](const codec::KeyId& id) -> std::optional<Bytes> {
        if (id == session.id) return session.key;
        return std::nullopt;
    };

    // roundtrip identity: 1000 random messages across the three combos
    std::mt19937_64 rng(77);
    int delivered = 0;
    const bool combos[3][2] = {{true, false}, {false, true}, {true, true}};
    for (int i = 0; i < 1000; ++i) {
        const bool* combo = combos[i % 3];
        Bytes msg(rng() % 65536);
        for (auto& b : msg) b = static_cast<std::uint8_t>(rng());
        codec::XofNonceSource nonces(Bytes{static_cast<std::uint8_t>(i),
                                           static_cast<std::uint8_t>(i >> 8), 0x99});
        Bytes env = codec::seal(msg, make_ctx(combo[0], combo[1]), nonces);
        codec::ReplayRegistry reg;
        auto outcome = codec::open(env, recipient.secret_key, lookup, signer.public_key, reg);
        if (outcome.ok() && *outcome.message == msg) ++delivered;
    }

    // exhaustive single-byte mutation of the golden envelope
    codec::XofNonceSource nonces(to_bytes("acceptance-golden"));
    Bytes golden = codec::seal(to_bytes("golden acceptance message"), make_ctx(true, true), nonces);
    std::size_t mutants = 0, errors = 0, wrong_messages = 0;
    for (std::size_t pos = 0; pos < golden.size(); ++pos) {
        for (std::uint8_t flip : {std::uint8_t{0x01}, std::uint8_t{0xFF}}) {
            Bytes mutant = golden;
            mutant[pos] ^= flip;
            codec::ReplayRegistry reg;
            auto outcome =
                codec::open(mutant, recipient.secret_key, lookup, signer.public_key, reg);
            ++mutants;
            if (!outcome.ok()) {
                ++errors;
            } else if (*outcome.message != to_bytes("golden acceptance message")) {
                ++wrong_messages;
            }
        }
    }

    bool pass = delivered == 1000 && errors == mutants && wrong_messages == 0;
    verdict(4, "envelope tamper totality and roundtrip", pass,
            std::to_string(delivered) + "/1000 roundtrips, " + std::to_string(errors) + "/" +
                std::to_string(mutants) + " mutants rejected (envelope " +
                std::to_string(golden.size()) + " bytes), " + std::to_string(wrong_messages) +
                " wrong deliveries");
}

// --- 5. Replay rejection and one-time key release ----------------------------

void criterion_replay_one_time() {
    bool pass = true;
    std::string detail;

    // duplicate envelope
    auto signer = dilithium3::sig_keygen(Bytes(32, 0x21));
    codec::SessionKeyRef session;
    session.id.fill(0x77);
    session.key = Bytes(32, 0x10);
    codec::SealContext ctx;
    ctx.signer_secret_key = signer.secret_key;
    ctx.session_key = session;
    codec::XofNonceSource nonces(to_bytes("replay-acceptance"));
    Bytes env = codec::seal(to_bytes("one shot"), ctx, nonces);
    codec::ReplayRegistry reg;
    codec::KeyLookup lookup = [&](const codec::KeyId&) -> std::optional<Bytes> {
        return session.key;
    };
    auto first = codec::open(env, {}, lookup, signer.public_key, reg);
    auto second = codec::open(env, {}, lookup, signer.public_key, reg);
    if (!first.ok() || second.ok() || second.error != codec::OpenError::ReplayDetected) {
        pass = false;
        detail += "duplicate envelope handling broken; ";
    }

    // randomized 1000-operation request sequences against the pool
    std::mt19937_64 rng(555);
    keysvc::KeyPool pool;
    std::map<keysvc::KeyId, int> alice_gets, bob_gets;
    std::vector<keysvc::KeyId> seen_ids;
    int tag = 0;
    for (int op = 0; op < 1000; ++op) {
        int action = static_cast<int>(rng() % 3);
        if (action == 0 && tag < 250) {
            qkd::SessionKeyMaterial m;
            m.key_id.fill(static_cast<std::uint8_t>(tag++));
            m.key_bits.assign(256, 1);
            pool.ingest(m);
        } else if (action == 1) {
            keysvc::KeyRequest req;
            req.op = keysvc::Op::GetKey;
            req.requester = "alice";
            req.peer = "bob";
            req.size_bits = 128;
            auto resp = pool.serve(req);
            if (resp.ok) {
                ++alice_gets[resp.key_id];
                seen_ids.push_back(resp.key_id);
            }
        } else if (!seen_ids.empty()) {
            keysvc::KeyRequest req;
            req.op = keysvc::Op::GetKeyById;
            req.requester = "bob";
            req.key_id = seen_ids[rng() % seen_ids.size()];
            auto resp = pool.serve(req);
            if (resp.ok) ++bob_gets[req.key_id];
        }
    }
    for (const auto& [id, n] : alice_gets) {
        if (n > 1) pass = false;
    }
    for (const auto& [id, n] : bob_gets) {
        if (n > 1) pass = false;
    }
    if (detail.empty()) {
        detail = "duplicate -> ReplayDetected; " + std::to_string(alice_gets.size()) +
                 " requester and " + std::to_string(bob_gets.size()) +
                 " peer releases, none repeated, over 1000 ops";
    }
    verdict(5, "replay rejection and one-time keys", pass, detail);
}

// --- 6. Shor demo -------------------------------------------------------------

void criterion_shor() {
    bool pass = true;
    std::string detail;

    shor::OrderFindingConfig cfg;  // N=15, x=7, t=8
    auto dist = shor::argument_distribution(
        shor::apply_qft_argument(shor::build_order_state(cfg), 8));
    for (std::size_t z = 0; z < dist.size(); ++z) {
        double expect = (z % 64 == 0) ? 0.25 : 0.0;
        if (std::abs(dist[z] - expect) > 1e-9) {
            pass = false;
            detail += "spike mass misplaced; ";
            break;
        }
    }

    int recovered = 0;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        auto samples = shor::sample_z(dist, 7000 + trial, 5);
        for (auto z : samples) {
            auto r = shor::extract_period(z, 256, 15, 7);
            if (r.has_value() && *r == 4) {
                ++recovered;
                break;
            }
        }
    }
    if (recovered < 990) {
        pass = false;
        detail += "period recovery " + std::to_string(recovered) + "/1000; ";
    }

    auto f15 = shor::shor_factor(15, 3);
    auto f21 = shor::shor_factor(21, 3);
    bool factors_ok = f15.has_value() && std::min(f15->p, f15->q) == 3 &&
                      std::max(f15->p, f15->q) == 5 && f21.has_value() &&
                      std::min(f21->p, f21->q) == 3 && std::max(f21->p, f21->q) == 7;
    if (!factors_ok) {
        pass = false;
        detail += "factoring broken; ";
    }

    // gate QFT vs dense DFT oracle, t <= 10
    double worst = 0.0;
    for (int t = 1; t <= 10; ++t) {
        shor::StateVector s;
        s.argument_qubits = t;
        s.function_qubits = 2;
        s.amplitudes.resize(1ull << (t + 2));
        std::mt19937_64 rng(900 + static_cast<std::uint64_t>(t));
        double total = 0.0;
        for (auto& amp : s.amplitudes) {
            amp = {static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5,
                   static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5};
            total += std::norm(amp);
        }
        for (auto& amp : s.amplitudes) amp /= std::sqrt(total);

        const std::uint64_t T = s.argument_dim();
        shor::StateVector oracle = s;
        for (std::uint64_t f = 0; f < s.function_dim(); ++f) {
            for (std::uint64_t z = 0; z < T; ++z) {
                std::complex<double> acc{0, 0};
                for (std::uint64_t a = 0; a < T; ++a) {
                    acc += s.at(a, f) *
                           std::polar(1.0, 2.0 * M_PI * static_cast<double>(a * z % T) /
                                               static_cast<double>(T));
                }
                oracle.at(z, f) = acc / std::sqrt(static_cast<double>(T));
            }
        }
        auto gates = shor::apply_qft_argument(s, t);
        for (std::size_t i = 0; i < gates.amplitudes.size(); ++i) {
            worst = std::max(worst, std::abs(gates.amplitudes[i] - oracle.amplitudes[i]));
        }
    }
    if (worst > 1e-9) {
        pass = false;
        detail += "QFT/DFT deviation " + std::to_string(worst) + "; ";
    }

    if (detail.empty()) {
        detail = "spikes exact, recovery " + std::to_string(recovered) +
                 "/1000 within 5 samples, 15 -> {3,5}, 21 -> {3,7}, max QFT deviation " +
                 std::to_string(worst);
    }
    verdict(6, "order-finding demo", pass, detail);
}

// --- 7. Approximate QFT keeps the recovery rate ------------------------------

void criterion_approx_qft() {
    shor::OrderFindingConfig cfg;
    auto exact_dist = shor::argument_distribution(
        shor::apply_qft_argument(shor::build_order_state(cfg), 8));
    auto approx_dist = shor::argument_distribution(
        shor::apply_qft_argument(shor::build_order_state(cfg), 6));

    auto success_rate = [&](const std::vector<double>& dist, std::uint64_t seed_base) {
        int hits = 0;
        for (std::uint64_t trial = 0; trial < 1000; ++trial) {
            auto samples = shor::sample_z(dist, seed_base + trial, 1);
            auto r = shor::extract_period(samples[0], 256, 15, 7);
            if (r.has_value() && *r == 4) ++hits;
        }
        return static_cast<double>(hits) / 1000.0;
    };
    double exact = success_rate(exact_dist, 100000);
    double approx = success_rate(approx_dist, 200000);
    bool pass = std::abs(exact - approx) < 0.05;
    verdict(7, "approximate QFT (cutoff 6)", pass,
            "success exact " + std::to_string(exact) + " vs cutoff-6 " + std::to_string(approx) +
                ", |delta| < 0.05 required");
}

// --- 8. Deterministic scenario reports ---------------------------------------

void criterion_determinism() {
    std::vector<netsim::ScenarioSpec> fixtures;
    {
        netsim::ScenarioSpec quiet;
        quiet.seed = 404;
        quiet.n_pulses = 40000;
        quiet.channel.noise_flip_prob = 0.01;
        quiet.messages = {to_bytes("alpha"), to_bytes("bravo"), to_bytes("charlie")};
        fixtures.push_back(quiet);

        netsim::ScenarioSpec eve = quiet;
        eve.channel.eve_mode = qkd::EveMode::InterceptResend;
        eve.channel.intercept_prob = 1.0;
        fixtures.push_back(eve);

        netsim::ScenarioSpec tamper = quiet;
        tamper.classical_adversary.kind = netsim::AdversaryKind::TamperByte;
        tamper.classical_adversary.message_index = 1;
        tamper.classical_adversary.byte_offset = 33;
        fixtures.push_back(tamper);

        netsim::ScenarioSpec replay = quiet;
        replay.classical_adversary.kind = netsim::AdversaryKind::ReplayEnvelope;
        replay.classical_adversary.message_index = 0;
        fixtures.push_back(replay);

        netsim::ScenarioSpec hybrid = quiet;
        hybrid.layer_kyber = true;
        fixtures.push_back(hybrid);

        netsim::ScenarioSpec kyber_only = quiet;
        kyber_only.layer_qkd = false;
        kyber_only.layer_kyber = true;
        kyber_only.classical_adversary.kind = netsim::AdversaryKind::ReplayEnvelope;
        kyber_only.classical_adversary.message_index = 2;
        fixtures.push_back(kyber_only);
    }

    bool pass = true;
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
        std::string a = netsim::report_to_json(netsim::run_scenario(fixtures[i]));
        std::string b = netsim::report_to_json(netsim::run_scenario(fixtures[i]));
        if (a != b) pass = false;
    }
    verdict(8, "scenario reports byte-identical across runs", pass,
            std::to_string(fixtures.size()) + " fixture scenarios, two runs each");
}

}  // namespace

int main() {
    auto start = std::chrono::steady_clock::now();
    criterion_qber_law();
    criterion_detection();
    criterion_pqc();
    criterion_envelope();
    criterion_replay_one_time();
    criterion_shor();
    criterion_approx_qft();
    criterion_determinism();
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    std::printf("%d/8 criteria passed in %.1f s\n", 8 - g_failures,
                static_cast<double>(elapsed.count()) / 1000.0);
    return g_failures == 0 ? 0 : 1;
}
