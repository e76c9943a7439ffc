#include "qgp/shor.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "qgp/rng.hpp"

namespace qgp::shor {

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    if (mod == 0) throw std::invalid_argument("pow_mod: zero modulus");
    unsigned __int128 result = 1;
    unsigned __int128 acc = base % mod;
    while (exp > 0) {
        if (exp & 1) result = (result * acc) % mod;
        acc = (acc * acc) % mod;
        exp >>= 1;
    }
    return static_cast<std::uint64_t>(result);
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

bool is_prime_power(std::uint64_t n) {
    if (n < 2) return false;
    std::uint64_t p = n;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            p = d;
            break;
        }
    }
    while (n % p == 0) n /= p;
    return n == 1;
}

int OrderFindingConfig::function_qubits() const {
    int n = 0;
    while ((1ull << n) < modulus) ++n;
    return n;
}

void OrderFindingConfig::validate() const {
    if (modulus < 15 || modulus % 2 == 0 || is_prime_power(modulus)) {
        throw std::invalid_argument(
            "order finding: modulus must be an odd composite >= 15 and not a prime power");
    }
    if (base <= 1 || base >= modulus) {
        throw std::invalid_argument("order finding: base must satisfy 1 < base < modulus");
    }
    if (std::gcd(base, modulus) != 1) {
        throw std::invalid_argument("order finding: base must be coprime to the modulus");
    }
    if (argument_qubits < 1 || argument_qubits > 62) {
        throw std::invalid_argument("order finding: argument register must hold >= 1 qubit");
    }
    double amps = std::ldexp(1.0, argument_qubits + function_qubits());
    if (amps > static_cast<double>(amplitude_budget)) {
        throw std::length_error("order finding: state exceeds the amplitude budget");
    }
}

double StateVector::norm() const {
    double total = 0.0;
    for (const auto& a : amplitudes) total += std::norm(a);
    return std::sqrt(total);
}

StateVector build_order_state(const OrderFindingConfig& cfg) {
    cfg.validate();
    StateVector state;
    state.argument_qubits = cfg.argument_qubits;
    state.function_qubits = cfg.function_qubits();
    state.amplitudes.assign(cfg.argument_dim() * cfg.function_dim(), {0.0, 0.0});

    const double amp = 1.0 / std::sqrt(static_cast<double>(cfg.argument_dim()));
    std::uint64_t value = 1;  // base^0
    for (std::uint64_t a = 0; a < cfg.argument_dim(); ++a) {
        state.at(a, value) = {amp, 0.0};
        value = (value * cfg.base) % cfg.modulus;
    }
    return state;
}

namespace {

// Gates act on argument qubit j, which is global index bit (function_qubits + j).

void hadamard(StateVector& state, int arg_qubit) {
    const std::uint64_t bit = 1ull << (state.function_qubits + arg_qubit);
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const std::uint64_t size = state.amplitudes.size();
    for (std::uint64_t i = 0; i < size; ++i) {
        if (i & bit) continue;
        auto a0 = state.amplitudes[i];
        auto a1 = state.amplitudes[i | bit];
        state.amplitudes[i] = (a0 + a1) * inv_sqrt2;
        state.amplitudes[i | bit] = (a0 - a1) * inv_sqrt2;
    }
}

void controlled_phase(StateVector& state, int control_qubit, int target_qubit, double angle) {
    const std::uint64_t mask = (1ull << (state.function_qubits + control_qubit)) |
                               (1ull << (state.function_qubits + target_qubit));
    const std::complex<double> phase = std::polar(1.0, angle);
    const std::uint64_t size = state.amplitudes.size();
    for (std::uint64_t i = 0; i < size; ++i) {
        if ((i & mask) == mask) state.amplitudes[i] *= phase;
    }
}

void reverse_argument_qubits(StateVector& state) {
    const int t = state.argument_qubits;
    const std::uint64_t fdim = state.function_dim();
    const std::uint64_t tdim = state.argument_dim();
    for (std::uint64_t a = 0; a < tdim; ++a) {
        std::uint64_t rev = 0;
        for (int b = 0; b < t; ++b) rev = (rev << 1) | ((a >> b) & 1);
        if (rev <= a) continue;
        for (std::uint64_t f = 0; f < fdim; ++f) std::swap(state.at(a, f), state.at(rev, f));
    }
}

}  // namespace

StateVector apply_qft_argument(StateVector state, int cutoff_k) {
    const int t = state.argument_qubits;
    if (cutoff_k < 1 || cutoff_k > t) {
        throw std::invalid_argument("apply_qft_argument: cutoff outside [1, t]");
    }
    for (int target = t - 1; target >= 0; --target) {
        hadamard(state, target);
        for (int control = target - 1; control >= 0; --control) {
            int j = target - control;  // rotation angle pi / 2^j
            if (j >= cutoff_k) continue;
            controlled_phase(state, control, target, std::numbers::pi / std::ldexp(1.0, j));
        }
    }
    reverse_argument_qubits(state);
    return state;
}

std::vector<double> argument_distribution(const StateVector& state) {
    std::vector<double> dist(state.argument_dim(), 0.0);
    for (std::uint64_t a = 0; a < state.argument_dim(); ++a) {
        double p = 0.0;
        for (std::uint64_t f = 0; f < state.function_dim(); ++f) p += std::norm(state.at(a, f));
        dist[a] = p;
    }
    return dist;
}

std::vector<std::uint64_t> sample_z(const std::vector<double>& distribution,
                                    std::uint64_t rng_seed, std::size_t count) {
    std::vector<double> cumulative(distribution.size());
    double total = 0.0;
    for (std::size_t i = 0; i < distribution.size(); ++i) {
        if (distribution[i] < 0.0) throw std::invalid_argument("sample_z: negative probability");
        total += distribution[i];
        cumulative[i] = total;
    }
    if (std::abs(total - 1.0) > 1e-6) {
        throw std::invalid_argument("sample_z: distribution does not sum to 1");
    }

    DeterministicRng rng(rng_seed);
    std::vector<std::uint64_t> samples;
    samples.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        double u = rng.uniform_double() * total;
        auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        samples.push_back(static_cast<std::uint64_t>(it - cumulative.begin()));
    }
    return samples;
}

std::optional<std::uint64_t> extract_period(std::uint64_t z, std::uint64_t T, std::uint64_t N,
                                            std::uint64_t x) {
    if (T == 0 || z >= T) throw std::invalid_argument("extract_period: need 0 <= z < T");
    if (z == 0) return std::nullopt;

    // Convergent denominators of the continued fraction of z/T.
    std::vector<std::uint64_t> denominators;
    std::uint64_t num = z, den = T;
    std::uint64_t q_prev = 0, q_curr = 1;
    while (den != 0) {
        std::uint64_t quot = num / den;
        std::uint64_t rem = num % den;
        std::uint64_t q_next = quot * q_curr + q_prev;
        if (q_next > N) break;
        denominators.push_back(q_next);
        q_prev = q_curr;
        q_curr = q_next;
        num = den;
        den = rem;
    }

    std::optional<std::uint64_t> best;
    for (std::uint64_t q : denominators) {
        if (q == 0) continue;
        for (std::uint64_t mult = 1; mult <= 4; ++mult) {
            std::uint64_t candidate = q * mult;
            if (candidate == 0 || candidate > N) break;
            if (pow_mod(x, candidate, N) == 1) {
                if (!best.has_value() || candidate < *best) best = candidate;
            }
        }
    }
    return best;
}

std::uint64_t multiplicative_order(std::uint64_t N, std::uint64_t x) {
    if (N < 2 || std::gcd(x % N, N) != 1) {
        throw std::invalid_argument("multiplicative_order: base not coprime to modulus");
    }
    std::uint64_t value = x % N;
    std::uint64_t r = 1;
    while (value != 1) {
        value = (value * x) % N;
        ++r;
    }
    return r;
}

std::optional<FactorResult> shor_factor(std::uint64_t N, std::uint64_t rng_seed,
                                        int max_attempts) {
    if (N < 15 || N % 2 == 0 || is_prime_power(N)) {
        throw std::invalid_argument("shor_factor: N must be an odd composite, not a prime power");
    }

    DeterministicRng rng(rng_seed);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::uint64_t x = 2 + rng.below(N - 3);  // uniform in (1, N)
        std::uint64_t g = std::gcd(x, N);
        if (g > 1) return FactorResult{g, N / g};

        OrderFindingConfig cfg;
        cfg.modulus = N;
        cfg.base = x;
        cfg.argument_qubits = 2 * cfg.function_qubits();
        auto state = apply_qft_argument(build_order_state(cfg), cfg.argument_qubits);
        auto dist = argument_distribution(state);
        auto samples = sample_z(dist, rng.next_u64(), 16);

        for (std::uint64_t z : samples) {
            auto r = extract_period(z, cfg.argument_dim(), N, x);
            if (!r.has_value() || *r % 2 != 0) continue;
            std::uint64_t half = pow_mod(x, *r / 2, N);
            if (half == N - 1) continue;  // x^{r/2} == -1 mod N
            std::uint64_t f = std::gcd(half >= 1 ? half - 1 : 0, N);
            if (f <= 1 || f >= N) f = std::gcd(half + 1, N);
            if (f > 1 && f < N) return FactorResult{f, N / f};
        }
    }
    return std::nullopt;
}

}  // namespace qgp::shor
