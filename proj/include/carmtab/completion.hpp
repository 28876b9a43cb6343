#pragma once

#include <cstdint>
#include <vector>

#include "carmtab/arith.hpp"
#include "carmtab/preproduct.hpp"
#include "carmtab/query.hpp"
#include "carmtab/record.hpp"

namespace carmtab {

enum class RuleKind { SmallPrime, InadmissiblePrime, PrimeSquare, InadmissibleProduct };

// One congruence eliminator: k is cleared when modulus | r* + k*lambda.
struct SieveRule {
    u128 modulus;
    RuleKind kind;
};

struct SieveConfig {
    // Inadmissible primes are sieved up to max(b, this).
    u64 inadmissible_prime_limit = 1000;
    // Prime squares q^2 <= square_cap and products q(2q+1) <= product_cap.
    u64 square_cap = 10000;
    u64 product_cap = 10000;
    // Bitmap chunk size; larger k ranges are processed in slices.
    u64 chunk_bits = u64(1) << 28;
};

// How a rule marks {k in [0, kmax] : modulus | r* + k*lambda}.
struct Marking {
    enum class Kind { None, All, Progression } kind;
    u128 k0 = 0;    // first marked k
    u128 step = 0;  // modulus / gcd(modulus, lambda)
};

Marking solve_progression(const SieveRule& rule, u128 r_star, u128 lambda);

// All rule families for a preproduct: primes <= b, inadmissible primes,
// prime squares, and inadmissible products q(2q+1) with q, 2q+1 prime.
std::vector<SieveRule> build_rules(const Preproduct& pre, const PrimeTable& table,
                                   const SieveConfig& cfg);

// The k-range bitmap for n = P*(r* + k*lambda) < B with the given rules
// applied; survivors[k] is true when no rule eliminated k. Throws
// std::length_error when kmax + 1 exceeds cfg.chunk_bits (callers split
// into k sub-ranges; lambda_sieve does this itself).
struct LambdaSieveJob {
    Preproduct pre;
    u128 B = 0;
    u128 r_star = 0;
    bool empty = true;  // no k satisfies P*(r* + k*lambda) < B
    u128 kmax = 0;
    std::vector<bool> survivors;

    u64 survivor_count() const;
};

LambdaSieveJob build_sieve_job(const Preproduct& pre, u128 B,
                               const std::vector<SieveRule>& rules, const SieveConfig& cfg);

// lambda(P)-sieving: scans n = P*(r* + k*lambda(P)) < B over k, clears k
// by the congruence rules, and runs the Carmichael query on survivors.
// Ascending by n. Completions with one or two cofactor primes are
// reported too; the orchestrator deduplicates.
std::vector<CarmichaelRecord> lambda_sieve(const Preproduct& pre, u128 B,
                                           const PrimeTable& table, const SieveConfig& cfg,
                                           const QueryOptions& qopts, Counters* counters);

// Single prime completion: all primes r with r == r* (mod lambda(P)),
// (r-1) | (P-1), r > b, r admissible, P*r < B. Either enumerates the
// divisors of P-1 or walks the residue class, whichever promises fewer
// candidates.
std::vector<CarmichaelRecord> single_prime_completion(const Preproduct& pre, u128 B,
                                                      Counters* counters);

}  // namespace carmtab
