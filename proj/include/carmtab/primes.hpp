#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "carmtab/arith.hpp"

namespace carmtab {

// is_prime is fully deterministic below this bound (~3.3 * 10^24 > 2^81):
// the strong test with bases 2..41 (the first 13 primes) has no composite
// liar below it. Below 2^64 the 7-base set kBases64 suffices.
inline constexpr u128 is_prime_limit =
    u128(3317044064) * 1000000000000000 + u128(679887385961981);

struct PrimeTable {
    u64 limit = 0;
    std::vector<u64> primes;  // exactly the primes <= limit, ascending

    // Index of the first prime > x (primes.size() when none).
    std::size_t first_above(u64 x) const;
};

// Simple sieve of Eratosthenes. Throws std::length_error when limit
// exceeds the configured memory guard (2^31).
PrimeTable sieve_primes(u64 limit);

struct FactoredInterval {
    u64 lo = 0, hi = 0;
    std::vector<Factorization> entries;  // entries[n - lo] for n in [lo, hi]

    const Factorization& at(u64 n) const { return entries[n - lo]; }
};

// Complete factorization of every integer in [lo, hi] by a segmented
// sieve over primes <= sqrt(hi). Window limited to 2^24 entries.
FactoredInterval factor_interval(u64 lo, u64 hi);

// Exact deterministic primality for n < is_prime_limit (covers the whole
// n < 2^81 contract). Throws std::domain_error beyond.
bool is_prime(u128 n);

// Complete factorization: trial division by small primes, then Brent's
// cycle-finding rho with deterministic restarts. n >= 2.
Factorization pollard_factor(u128 n);

// Same, but gives up after roughly max_iterations rho steps; nullopt on
// budget exhaustion.
std::optional<Factorization> pollard_factor_budgeted(u128 n, u64 max_iterations);

}  // namespace carmtab
