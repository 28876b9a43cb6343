#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "carmtab/arith.hpp"

namespace carmtab {

// A Carmichael number with its full prime factorization (ascending).
struct CarmichaelRecord {
    u128 n = 0;
    std::vector<u64> primes;

    auto operator<=>(const CarmichaelRecord& o) const { return n <=> o.n; }
    bool operator==(const CarmichaelRecord& o) const { return n == o.n; }
};

// Builds a record from a verified factorization. Throws std::logic_error
// when the factorization is inconsistent, fails Korselt, or has fewer
// than three primes.
CarmichaelRecord make_record(const Factorization& f);

// Work counters carried through a tabulation.
struct Counters {
    u64 jobs = 0;
    u64 sieve_calls = 0;
    u64 spc_calls = 0;
    u64 ladders = 0;

    Counters& operator+=(const Counters& o) {
        jobs += o.jobs;
        sieve_calls += o.sieve_calls;
        spc_calls += o.spc_calls;
        ladders += o.ladders;
        return *this;
    }
};

}  // namespace carmtab
