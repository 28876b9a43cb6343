#pragma once

#include <cstdint>
#include <vector>

#include "carmtab/arith.hpp"
#include "carmtab/preproduct.hpp"

namespace carmtab {

enum class RejectReason {
    FermatWitness,
    NotSquarefree,
    KorseltDivisibilityFail,
    InadmissibleFactor,
    FactorTooSmall,
    Prime,  // trivial-preproduct query on a prime input
};

const char* reject_reason_name(RejectReason r);

struct QueryVerdict {
    enum class Kind { Carmichael, NotCarmichael, Undecided } kind;
    Factorization factorization;  // set for Carmichael
    RejectReason reason = RejectReason::FermatWitness;
    u128 witness = 0;  // failing base, or the offending prime factor
    unsigned bases_tried = 0;

    bool carmichael() const { return kind == Kind::Carmichael; }
};

// Coprime multiplicative decomposition of n while factors are being
// discovered: product over pending and confirmed equals n.
struct PartialSplit {
    u128 n = 0;
    std::vector<u128> pending;    // composite cofactors
    std::vector<u128> confirmed;  // prime factors

    bool consistent() const;
};

// Splits every pending cofactor c by gcd(x - 1, c) when the gcd is
// proper, where x*x == 1 (mod n) and x != +-1. Parts are classified
// prime/composite. Throws std::invalid_argument when the precondition
// on x fails.
PartialSplit refine_split(PartialSplit split, u128 x);

struct QueryOptions {
    unsigned base_budget = 64;
    bool random_bases = false;
    u64 seed = 0;
    // On budget exhaustion, factor pending cofactors outright instead of
    // returning Undecided.
    bool factor_fallback = true;
};

struct QueryStats {
    u64 ladders = 0;
    u64 splits = 0;
    u64 fallback_factorizations = 0;
};

// Decides whether n = P*R (for the known cyclic divisor P, R > 1) is a
// Carmichael number. Iterates Fermat bases coprime to n; each base costs
// one square-and-multiply ladder that yields the Fermat residue and the
// strong sequence together. Fermat failure rejects immediately; strong
// failures split the pending cofactors; discovered primes are checked
// against floor_bound, pairwise admissibility, squarefreeness, and
// (f-1) | (n-1). With the default options the verdict is never Undecided.
QueryVerdict is_carmichael(u128 n, const Preproduct& known, u128 floor_bound,
                           const QueryOptions& opts = {}, QueryStats* stats = nullptr);

}  // namespace carmtab
