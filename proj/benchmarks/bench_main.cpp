#include <benchmark/benchmark.h>

#include <random>

#include "qgp/dilithium3.hpp"
#include "qgp/envelope.hpp"
#include "qgp/kyber768.hpp"
#include "qgp/qkd.hpp"
#include "qgp/sha3.hpp"
#include "qgp/shor.hpp"

using namespace qgp;

namespace {

Bytes seeded_bytes(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng());
    return out;
}

void BM_Sha3_256(benchmark::State& state) {
    Bytes data = seeded_bytes(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sha3_256(data));
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sha3_256)->Arg(64)->Arg(4096)->Arg(1 << 16);

void BM_KyberKeygen(benchmark::State& state) {
    Bytes seed = seeded_bytes(kyber768::kKeygenSeedBytes, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kyber768::kem_keygen(seed));
    }
}
BENCHMARK(BM_KyberKeygen);

void BM_KyberEncapsDecaps(benchmark::State& state) {
    auto kp = kyber768::kem_keygen(seeded_bytes(kyber768::kKeygenSeedBytes, 3));
    Bytes seed = seeded_bytes(kyber768::kEncapsSeedBytes, 4);
    for (auto _ : state) {
        auto enc = kyber768::encaps(kp.public_key, seed);
        benchmark::DoNotOptimize(kyber768::decaps(kp.secret_key, enc.ciphertext));
    }
}
BENCHMARK(BM_KyberEncapsDecaps);

void BM_DilithiumSign(benchmark::State& state) {
    auto kp = dilithium3::sig_keygen(seeded_bytes(32, 5));
    Bytes msg = seeded_bytes(static_cast<std::size_t>(state.range(0)), 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dilithium3::sign(kp.secret_key, msg));
    }
}
BENCHMARK(BM_DilithiumSign)->Arg(32)->Arg(4096);

void BM_DilithiumVerify(benchmark::State& state) {
    auto kp = dilithium3::sig_keygen(seeded_bytes(32, 7));
    Bytes msg = seeded_bytes(1024, 8);
    Bytes sig = dilithium3::sign(kp.secret_key, msg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dilithium3::verify(kp.public_key, msg, sig));
    }
}
BENCHMARK(BM_DilithiumVerify);

void BM_QkdExchange(benchmark::State& state) {
    qkd::ChannelParams params;
    params.noise_flip_prob = 0.01;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            qkd::run_exchange(static_cast<std::size_t>(state.range(0)), params, 0.11, seed++));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QkdExchange)->Arg(10000)->Arg(50000);

void BM_SealOpen(benchmark::State& state) {
    auto signer = dilithium3::sig_keygen(seeded_bytes(32, 9));
    auto recipient = kyber768::kem_keygen(seeded_bytes(64, 10));
    codec::SealContext ctx;
    ctx.signer_secret_key = signer.secret_key;
    codec::SessionKeyRef session;
    session.id.fill(1);
    session.key = seeded_bytes(32, 11);
    ctx.session_key = session;
    ctx.recipient_kem_public = recipient.public_key;
    Bytes msg = seeded_bytes(static_cast<std::size_t>(state.range(0)), 12);
    codec::KeyLookup lookup = [&](const codec::KeyId&) -> std::optional<Bytes> {
        return session.key;
    };
    std::uint64_t round = 0;
    for (auto _ : state) {
        codec::XofNonceSource nonces(seeded_bytes(16, round++));
        Bytes env = codec::seal(msg, ctx, nonces);
        codec::ReplayRegistry reg;
        benchmark::DoNotOptimize(
            codec::open(env, recipient.secret_key, lookup, signer.public_key, reg));
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SealOpen)->Arg(256)->Arg(65536);

void BM_QftExact(benchmark::State& state) {
    shor::OrderFindingConfig cfg;
    cfg.argument_qubits = static_cast<int>(state.range(0));
    auto base_state = shor::build_order_state(cfg);
    for (auto _ : state) {
        auto copy = base_state;
        benchmark::DoNotOptimize(shor::apply_qft_argument(std::move(copy), cfg.argument_qubits));
    }
}
BENCHMARK(BM_QftExact)->Arg(8)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
