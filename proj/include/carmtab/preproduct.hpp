#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "carmtab/arith.hpp"
#include "carmtab/primes.hpp"

namespace carmtab {

// A cyclic squarefree partial product P with lambda(P), its largest
// prime p, and the append bound b: primes appended to P must strictly
// exceed b. P = 1 is the trivial preproduct (p = 1, lambda = 1).
struct Preproduct {
    u128 P = 1;
    u128 lambda = 1;
    std::vector<u64> primes;  // ascending, distinct
    u64 p = 1;                // largest prime, 1 when P == 1
    u128 b = 1;

    // Recomputes everything from the prime list and checks the type
    // invariants (product, cyclicity, lambda, gcd(P, lambda) = 1, b >= p).
    bool valid() const;
};

// gcd(q - 1, P) == 1 and q does not divide P: appending q keeps the
// product cyclic.
bool is_admissible(u64 q, const Preproduct& pre);

// Least positive residue of P^(-1) mod lambda(P); in [1, lambda].
// By convention 1 for the trivial preproduct. Throws std::domain_error
// when gcd(P, lambda) != 1 (a broken invariant).
u128 r_star(const Preproduct& pre);

// P' = P*q, lambda' = lcm(lambda, q - 1), p' = b' = q. Requires q > b and
// is_admissible(q, pre); throws std::invalid_argument otherwise.
Preproduct extend(const Preproduct& pre, u64 q);

// Single-prime preproduct with a caller-chosen append bound.
Preproduct single_prime_preproduct(u64 p, u128 b);

// The job partition for a tabulation to B with crossover X: every odd
// cyclic squarefree P <= X with P*p^3 < B, carrying
// b = max(floor(X/P), p), plus the trivial job (1, 1, X). An appended
// prime q > b always pushes P*q strictly past X. Ascending by P.
// Even P are excluded: no Carmichael number is even, so they complete
// to nothing. Throws std::invalid_argument unless 2 <= X <= B.
std::vector<Preproduct> generate_jobs(u128 B, u128 X);

// Every odd squarefree cyclic P in (lo, hi] whose primes are all
// <= smooth_bound, built prime by prime in ascending order (each P seen
// exactly once), skipping any branch with P*lambda(P) > B. The callback
// receives each emitted Preproduct (b = p).
template <typename F>
void enumerate_smooth_cyclic(u128 lo, u128 hi, u64 smooth_bound, u128 B,
                             const PrimeTable& table, F&& emit);

// Every odd cyclic squarefree P with 1 < P <= X, built prime by prime in
// ascending order, each exactly once (b = p).
template <typename F>
void enumerate_cyclic(u128 X, const PrimeTable& table, F&& emit);

// Job file format: one `P lambda b` line per job, ASCII decimal.
void write_jobs(std::ostream& os, const std::vector<Preproduct>& jobs);
// Rebuilds the prime lists by factoring P.
std::vector<Preproduct> read_jobs(std::istream& is);

namespace detail {

template <typename F>
void smooth_dfs(const Preproduct& pre, u128 lo, u128 hi, u64 smooth_bound,
                u128 B, const PrimeTable& table, F& emit) {
    for (std::size_t i = table.first_above(pre.p); i < table.primes.size(); ++i) {
        u64 q = table.primes[i];
        if (q == 2) continue;
        if (q > smooth_bound) break;
        u128 next;
        if (mul_overflows(pre.P, q, next) || next > hi) break;
        if (!is_admissible(q, pre)) continue;
        Preproduct child = extend(pre, q);
        u128 pl;
        if (mul_overflows(child.P, child.lambda, pl) || pl > B) continue;
        if (child.P > lo) emit(child);
        smooth_dfs(child, lo, hi, smooth_bound, B, table, emit);
    }
}

template <typename F>
void cyclic_dfs(const Preproduct& pre, u128 X, const PrimeTable& table, F& emit) {
    for (std::size_t i = table.first_above(pre.p); i < table.primes.size(); ++i) {
        u64 q = table.primes[i];
        if (q == 2) continue;
        u128 next;
        if (mul_overflows(pre.P, q, next) || next > X) break;
        if (!is_admissible(q, pre)) continue;
        Preproduct child = extend(pre, q);
        emit(child);
        cyclic_dfs(child, X, table, emit);
    }
}

}  // namespace detail

template <typename F>
void enumerate_smooth_cyclic(u128 lo, u128 hi, u64 smooth_bound, u128 B,
                             const PrimeTable& table, F&& emit) {
    if (lo >= hi) throw std::invalid_argument("enumerate_smooth_cyclic: lo must be < hi");
    // smooth_bound < 3 admits no odd prime, so the range is empty.
    Preproduct one;
    detail::smooth_dfs(one, lo, hi, smooth_bound, B, table, emit);
}

template <typename F>
void enumerate_cyclic(u128 X, const PrimeTable& table, F&& emit) {
    Preproduct one;
    detail::cyclic_dfs(one, X, table, emit);
}

}  // namespace carmtab
