#include <CLI11.hpp>

#include <csignal>
#include <numeric>
#include <fstream>
#include <iostream>

#include "qgp/bytes.hpp"
#include "qgp/dilithium3.hpp"
#include "qgp/envelope.hpp"
#include "qgp/key_pool.hpp"
#include "qgp/key_service.hpp"
#include "qgp/kyber768.hpp"
#include "qgp/netsim.hpp"
#include "qgp/qkd.hpp"
#include "qgp/rng.hpp"
#include "qgp/sha3.hpp"
#include "qgp/shor.hpp"

using namespace qgp;

namespace {

// Exit taxonomy: 0 success, 1 authentication/verification failure,
// 2 alarm or abort, 3 usage/input error.
constexpr int kExitOk = 0;
constexpr int kExitAuthFailure = 1;
constexpr int kExitAbort = 2;
constexpr int kExitUsage = 3;

Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, ByteView data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

Bytes parse_seed32(const std::string& hex) {
    Bytes seed = hex_decode(hex);
    if (seed.size() != 32) throw std::runtime_error("seed must be 32 bytes (64 hex chars)");
    return seed;
}

// Session key files: 16-byte key id followed by the raw key bytes.
codec::SessionKeyRef load_session_key(const std::string& path) {
    Bytes raw = read_file(path);
    if (raw.size() < 16 + 32) throw std::runtime_error("session key file too short");
    codec::SessionKeyRef ref;
    std::copy_n(raw.begin(), 16, ref.id.begin());
    ref.key.assign(raw.begin() + 16, raw.end());
    return ref;
}

int cmd_keygen(const std::string& scheme, const std::string& seed_hex, const std::string& out) {
    Bytes seed = parse_seed32(seed_hex);
    if (scheme == "dilithium3") {
        auto kp = dilithium3::sig_keygen(seed);
        write_file(out, kp.secret_key);
        write_file(out + ".pub", kp.public_key);
    } else if (scheme == "kyber768") {
        // expand the uniform 32-byte seed into the keygen's (d, z) pair
        Bytes input = seed;
        Bytes tag = to_bytes("QGP-kem-keygen");
        input.insert(input.end(), tag.begin(), tag.end());
        auto kp = kyber768::kem_keygen(shake256(input, kyber768::kKeygenSeedBytes));
        write_file(out, kp.secret_key);
        write_file(out + ".pub", kp.public_key);
    } else {
        std::cerr << "unknown scheme: " << scheme << "\n";
        return kExitUsage;
    }
    std::cout << "wrote " << out << " and " << out << ".pub\n";
    return kExitOk;
}

int cmd_qkd_simulate(std::size_t pulses, double noise, double loss, double eve, double threshold,
                     std::uint64_t seed, std::size_t rounds, const std::string& csv_path,
                     const std::string& key_out) {
    qkd::ChannelParams params;
    params.noise_flip_prob = noise;
    params.loss_prob = loss;
    if (eve > 0.0) {
        params.eve_mode = qkd::EveMode::InterceptResend;
        params.intercept_prob = eve;
    }

    std::ofstream csv;
    if (!csv_path.empty()) {
        csv.open(csv_path);
        if (!csv) throw std::runtime_error("cannot write " + csv_path);
        csv << "round,qber,sifted_bits,key_bits,alarm\n";
    }

    bool any_abort = false;
    for (std::size_t round = 0; round < rounds; ++round) {
        auto outcome = qkd::run_exchange(pulses, params, threshold, seed + round);
        std::size_t key_bits = outcome.key.has_value() ? outcome.key->key_bits.size() : 0;
        bool alarm = outcome.status == qkd::ExchangeStatus::QberAlarm;
        if (outcome.status != qkd::ExchangeStatus::Ok) any_abort = true;

        if (csv.is_open()) {
            csv << round << ',' << outcome.qber << ',' << outcome.sifted_bits << ',' << key_bits
                << ',' << (alarm ? "true" : "false") << '\n';
        }
        std::cout << "round " << round << ": qber=" << outcome.qber
                  << " sifted=" << outcome.sifted_bits << " key_bits=" << key_bits
                  << (alarm ? " ALARM" : "") << "\n";

        if (outcome.key.has_value() && !key_out.empty() && round == 0) {
            Bytes blob(outcome.key->key_id.begin(), outcome.key->key_id.end());
            Bytes packed = qkd::pack_bits(outcome.key->key_bits);
            blob.insert(blob.end(), packed.begin(), packed.end());
            write_file(key_out, blob);
        }
    }
    return any_abort ? kExitAbort : kExitOk;
}

int cmd_keyd(const std::string& listen, std::size_t pulses, double noise, std::size_t rounds,
             std::uint64_t seed, double threshold) {
    keysvc::KeyPool pool;
    qkd::ChannelParams params;
    params.noise_flip_prob = noise;
    for (std::size_t round = 0; round < rounds; ++round) {
        auto outcome = qkd::run_exchange(pulses, params, threshold, seed + round);
        if (outcome.status == qkd::ExchangeStatus::Ok) {
            pool.ingest(*outcome.key);
        } else if (outcome.status == qkd::ExchangeStatus::QberAlarm) {
            pool.raise_alarm(outcome.qber);
        }
    }
    std::cerr << "pool holds " << pool.stored_bits() << " bits\n";

    keysvc::KeyServer server(pool, listen);
    std::cout << "listening on port " << server.port() << "\n" << std::flush;

    // Serve until interrupted.
    static std::atomic<bool> interrupted{false};
    std::signal(SIGINT, [](int) { interrupted = true; });
    std::signal(SIGTERM, [](int) { interrupted = true; });
    while (!interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return kExitOk;
}

int cmd_seal(const std::string& in, const std::string& out, const std::string& sign_key,
             const std::string& kem_pub, const std::string& key_service,
             const std::string& session_key_path, const std::string& seed_hex,
             const std::string& requester, const std::string& peer) {
    codec::SealContext ctx;
    ctx.signer_secret_key = read_file(sign_key);
    if (!kem_pub.empty()) ctx.recipient_kem_public = read_file(kem_pub);

    if (!session_key_path.empty()) {
        ctx.session_key = load_session_key(session_key_path);
    } else if (!key_service.empty()) {
        keysvc::KeyClient client(key_service);
        keysvc::KeyRequest req;
        req.op = keysvc::Op::GetKey;
        req.requester = requester;
        req.peer = peer;
        req.size_bits = 256;
        auto resp = client.request(req);
        if (!resp.ok) {
            std::cerr << "key service refused: " << keysvc::error_code_name(resp.code) << "\n";
            return resp.code == keysvc::ErrorCode::AlarmActive ? kExitAbort : kExitAbort;
        }
        codec::SessionKeyRef ref;
        ref.id = resp.key_id;
        ref.key = resp.key;
        ctx.session_key = ref;
    }

    if (!ctx.session_key.has_value() && !ctx.recipient_kem_public.has_value()) {
        std::cerr << "need --session-key/--key-service or --kem-pub\n";
        return kExitUsage;
    }

    codec::XofNonceSource nonces(parse_seed32(seed_hex));
    Bytes envelope = codec::seal(read_file(in), ctx, nonces);
    write_file(out, envelope);
    std::cout << "sealed " << envelope.size() << " bytes\n";
    return kExitOk;
}

int cmd_open(const std::string& in, const std::string& out, const std::string& verify_key,
             const std::string& kem_key, const std::string& key_service,
             const std::string& session_key_path, const std::string& requester,
             const std::string& replay_db) {
    Bytes envelope = read_file(in);
    Bytes verify_pk = read_file(verify_key);
    Bytes kem_sk;
    if (!kem_key.empty()) kem_sk = read_file(kem_key);

    codec::KeyLookup lookup;
    if (!session_key_path.empty()) {
        auto ref = load_session_key(session_key_path);
        lookup = [ref](const codec::KeyId& id) -> std::optional<Bytes> {
            if (id == ref.id) return ref.key;
            return std::nullopt;
        };
    } else if (!key_service.empty()) {
        std::string addr = key_service;
        std::string who = requester;
        lookup = [addr, who](const codec::KeyId& id) -> std::optional<Bytes> {
            keysvc::KeyClient client(addr);
            keysvc::KeyRequest req;
            req.op = keysvc::Op::GetKeyById;
            req.requester = who;
            req.key_id = id;
            auto resp = client.request(req);
            if (!resp.ok) return std::nullopt;
            return resp.key;
        };
    }

    codec::ReplayRegistry registry;
    if (!replay_db.empty()) {
        std::ifstream db(replay_db);
        std::string line;
        while (std::getline(db, line)) {
            if (!line.empty()) registry.insert_token(hex_decode(line));
        }
    }

    auto outcome = codec::open(envelope, kem_sk, lookup, verify_pk, registry);
    if (!outcome.ok()) {
        std::cerr << "open failed: " << codec::open_error_name(outcome.error) << "\n";
        return kExitAuthFailure;
    }
    if (!replay_db.empty()) {
        std::ofstream db(replay_db, std::ios::app);
        auto decoded = codec::decode_envelope(envelope);
        db << hex_encode(codec::ReplayRegistry::token_of(std::get<codec::QgpEnvelope>(decoded)))
           << "\n";
    }
    if (out.empty()) {
        std::cout.write(reinterpret_cast<const char*>(outcome.message->data()),
                        static_cast<std::streamsize>(outcome.message->size()));
    } else {
        write_file(out, *outcome.message);
        std::cerr << "wrote " << outcome.message->size() << " bytes\n";
    }
    return kExitOk;
}

int cmd_scenario(const std::string& spec_path, const std::string& report_path) {
    std::ifstream in(spec_path);
    if (!in) throw std::runtime_error("cannot read " + spec_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto spec = netsim::spec_from_json(text);
    auto report = netsim::run_scenario(spec);
    std::string json = netsim::report_to_json(report);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        out << json << "\n";
    } else {
        std::cout << json << "\n";
    }

    if (report.alarm_triggered) return kExitAbort;
    for (const auto& m : report.per_message) {
        if (!m.delivered) return kExitAuthFailure;
    }
    return kExitOk;
}

int cmd_shor(std::uint64_t n, std::uint64_t x, int t, int cutoff, std::uint64_t seed,
             const std::string& hist_path) {
    shor::OrderFindingConfig cfg;
    cfg.modulus = n;
    if (x == 0) {
        // deterministic coprime base pick
        DeterministicRng rng(seed);
        do {
            cfg.base = 2 + rng.below(n - 3);
        } while (std::gcd(cfg.base, n) != 1);
    } else {
        cfg.base = x;
    }
    cfg.argument_qubits = t > 0 ? t : 2 * cfg.function_qubits();
    if (cutoff == 0) cutoff = cfg.argument_qubits;

    auto state = shor::apply_qft_argument(shor::build_order_state(cfg), cutoff);
    auto dist = shor::argument_distribution(state);

    if (!hist_path.empty()) {
        std::ofstream csv(hist_path);
        if (!csv) throw std::runtime_error("cannot write " + hist_path);
        csv << "z,probability\n";
        for (std::size_t z = 0; z < dist.size(); ++z) csv << z << ',' << dist[z] << '\n';
    }

    auto samples = shor::sample_z(dist, seed, 32);
    std::optional<std::uint64_t> period;
    for (auto z : samples) {
        auto r = shor::extract_period(z, cfg.argument_dim(), cfg.modulus, cfg.base);
        if (r.has_value()) {
            period = r;
            break;
        }
    }
    if (!period.has_value()) {
        std::cerr << "no period recovered from " << samples.size() << " samples\n";
        return kExitAbort;
    }
    std::cout << "base " << cfg.base << " has period " << *period << " mod " << cfg.modulus
              << "\n";

    auto factors = shor::shor_factor(n, seed);
    if (!factors.has_value()) {
        std::cerr << "factoring attempts exhausted\n";
        return kExitAbort;
    }
    std::cout << "factors: " << std::min(factors->p, factors->q) << ","
              << std::max(factors->p, factors->q) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"QGP testbed: quantum-key channel, post-quantum envelopes, and the order-finding demo"};
    app.require_subcommand(1);

    std::string scheme, seed_hex, out_path, in_path, csv_path, key_out;
    std::string sign_key, kem_pub, kem_key, verify_key, key_service, session_key, replay_db;
    std::string listen_addr, spec_path, report_path, hist_path;
    std::string requester = "alice", peer = "bob";
    std::size_t pulses = 50000, rounds = 1, keyd_rounds = 4;
    double noise = 0.0, loss = 0.0, eve = 0.0, threshold = 0.11;
    std::uint64_t seed_u64 = 1;
    std::uint64_t shor_n = 15, shor_x = 0;
    int shor_t = 0, qft_cutoff = 0;

    auto* keygen = app.add_subcommand("keygen", "generate Dilithium3 or Kyber768 key files");
    keygen->add_option("--scheme", scheme, "dilithium3|kyber768")->required();
    keygen->add_option("--seed", seed_hex, "32-byte hex seed")->required();
    keygen->add_option("--out", out_path, "secret key path (.pub added for the public key)")
        ->required();

    auto* qkd_cmd = app.add_subcommand("qkd", "quantum channel simulation");
    auto* simulate = qkd_cmd->add_subcommand("simulate", "run BB84 exchanges");
    simulate->add_option("--pulses", pulses, "pulses per round");
    simulate->add_option("--noise", noise, "detector flip probability");
    simulate->add_option("--loss", loss, "pulse erasure probability");
    simulate->add_option("--eve", eve, "intercept-resend probability");
    simulate->add_option("--threshold", threshold, "QBER abort threshold");
    simulate->add_option("--seed", seed_u64, "simulation seed");
    simulate->add_option("--rounds", rounds, "number of rounds");
    simulate->add_option("--csv", csv_path, "round log path");
    simulate->add_option("--key-out", key_out, "write the first distilled key (id || bytes)");

    auto* keyd = app.add_subcommand("keyd", "serve session keys over TCP");
    keyd->add_option("--listen", listen_addr, "host:port")->required();
    keyd->add_option("--pulses", pulses, "pulses per preload round");
    keyd->add_option("--noise", noise, "channel noise for preload");
    keyd->add_option("--rounds", keyd_rounds, "preload rounds");
    keyd->add_option("--seed", seed_u64, "preload seed");
    keyd->add_option("--threshold", threshold, "QBER abort threshold");

    auto* seal_cmd = app.add_subcommand("seal", "sign, compress, and encrypt a message");
    seal_cmd->add_option("--in", in_path, "message file")->required();
    seal_cmd->add_option("--out", out_path, "envelope file")->required();
    seal_cmd->add_option("--sign-key", sign_key, "Dilithium3 secret key file")->required();
    seal_cmd->add_option("--kem-pub", kem_pub, "recipient Kyber768 public key file");
    seal_cmd->add_option("--key-service", key_service, "key service host:port");
    seal_cmd->add_option("--session-key", session_key, "session key file (id || bytes)");
    seal_cmd->add_option("--seed", seed_hex, "32-byte hex seed for nonces")->required();
    seal_cmd->add_option("--requester", requester, "requester name for the key service");
    seal_cmd->add_option("--peer", peer, "peer name for the key service");

    auto* open_cmd = app.add_subcommand("open", "verify and decrypt an envelope");
    open_cmd->add_option("--in", in_path, "envelope file")->required();
    open_cmd->add_option("--out", out_path, "write the message here instead of stdout");
    open_cmd->add_option("--verify-key", verify_key, "Dilithium3 public key file")->required();
    open_cmd->add_option("--kem-key", kem_key, "Kyber768 secret key file");
    open_cmd->add_option("--key-service", key_service, "key service host:port");
    open_cmd->add_option("--session-key", session_key, "session key file (id || bytes)");
    open_cmd->add_option("--requester", requester, "requester name for the key service")
        ->default_val("bob");
    open_cmd->add_option("--replay-db", replay_db, "persistent replay token list");

    auto* scenario = app.add_subcommand("scenario", "run a TCP/IPQ scenario");
    scenario->add_option("--spec", spec_path, "scenario spec JSON")->required();
    scenario->add_option("--report", report_path, "report JSON path (stdout when absent)");

    auto* shor_cmd = app.add_subcommand("shor", "order-finding and factoring demo");
    shor_cmd->add_option("--n", shor_n, "modulus to factor")->required();
    shor_cmd->add_option("--x", shor_x, "base (picked from the seed when absent)");
    shor_cmd->add_option("--t", shor_t, "argument register qubits (default 2*ceil(log2 N))");
    shor_cmd->add_option("--qft-cutoff", qft_cutoff, "drop rotations of angle pi/2^j for j >= cutoff");
    shor_cmd->add_option("--seed", seed_u64, "sampling seed");
    shor_cmd->add_option("--hist", hist_path, "write the z,probability histogram CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (keygen->parsed()) return cmd_keygen(scheme, seed_hex, out_path);
        if (simulate->parsed()) {
            return cmd_qkd_simulate(pulses, noise, loss, eve, threshold, seed_u64, rounds,
                                    csv_path, key_out);
        }
        if (keyd->parsed()) {
            return cmd_keyd(listen_addr, pulses, noise, keyd_rounds, seed_u64, threshold);
        }
        if (seal_cmd->parsed()) {
            return cmd_seal(in_path, out_path, sign_key, kem_pub, key_service, session_key,
                            seed_hex, requester, peer);
        }
        if (open_cmd->parsed()) {
            return cmd_open(in_path, out_path, verify_key, kem_key, key_service, session_key,
                            requester, replay_db);
        }
        if (scenario->parsed()) return cmd_scenario(spec_path, report_path);
        if (shor_cmd->parsed()) {
            return cmd_shor(shor_n, shor_x, shor_t, qft_cutoff, seed_u64, hist_path);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
