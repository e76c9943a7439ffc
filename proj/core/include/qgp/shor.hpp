#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace qgp::shor {

inline constexpr std::size_t kDefaultAmplitudeBudget = 1ull << 24;

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);
bool is_prime(std::uint64_t n);
bool is_prime_power(std::uint64_t n);

struct OrderFindingConfig {
    std::uint64_t modulus = 15;  // odd composite, not a prime power, >= 15
    std::uint64_t base = 7;      // 1 < base < modulus, coprime to it
    int argument_qubits = 8;
    std::size_t amplitude_budget = kDefaultAmplitudeBudget;

    std::uint64_t argument_dim() const { return 1ull << argument_qubits; }
    int function_qubits() const;
    std::uint64_t function_dim() const { return 1ull << function_qubits(); }

    /// std::invalid_argument for arithmetic violations, std::length_error
    /// when the state would exceed the amplitude budget.
    void validate() const;
};

/// Dense amplitudes over argument (x) function registers,
/// index = a * function_dim + f.
struct StateVector {
    int argument_qubits = 0;
    int function_qubits = 0;
    std::vector<std::complex<double>> amplitudes;

    std::uint64_t argument_dim() const { return 1ull << argument_qubits; }
    std::uint64_t function_dim() const { return 1ull << function_qubits; }
    std::complex<double>& at(std::uint64_t a, std::uint64_t f) {
        return amplitudes[a * function_dim() + f];
    }
    const std::complex<double>& at(std::uint64_t a, std::uint64_t f) const {
        return amplitudes[a * function_dim() + f];
    }
    double norm() const;
};

/// The uniform argument superposition entangled with base^a mod N on the
/// function register: amplitude 1/sqrt(T) at (a, base^a mod N).
StateVector build_order_state(const OrderFindingConfig& cfg);

/// Gate-level QFT on the argument register: per target qubit a Hadamard and
/// controlled phase rotations of angle pi/2^j, dropping every rotation with
/// j >= cutoff_k, then the qubit-order reversal. cutoff_k == argument_qubits
/// reproduces the DFT matrix exactly; cutoff_k == 1 keeps only Hadamards.
StateVector apply_qft_argument(StateVector state, int cutoff_k);

/// Marginal measurement distribution of the argument register.
std::vector<double> argument_distribution(const StateVector& state);

std::vector<std::uint64_t> sample_z(const std::vector<double>& distribution,
                                    std::uint64_t rng_seed, std::size_t count);

/// Continued-fraction inversion of z/T: denominators of the convergents
/// (and multiples up to 4x) are tested as candidate orders; smallest hit
/// wins. z == 0 carries no information and yields nullopt.
std::optional<std::uint64_t> extract_period(std::uint64_t z, std::uint64_t T, std::uint64_t N,
                                            std::uint64_t x);

/// Brute-force multiplicative order, the oracle the quantum path must match.
std::uint64_t multiplicative_order(std::uint64_t N, std::uint64_t x);

struct FactorResult {
    std::uint64_t p;
    std::uint64_t q;
};

/// Classical reduction around the simulated order finder. nullopt when
/// max_attempts random bases fail; throws on precondition violations
/// (even, prime, or prime-power N).
std::optional<FactorResult> shor_factor(std::uint64_t N, std::uint64_t rng_seed,
                                        int max_attempts = 16);

}  // namespace qgp::shor
