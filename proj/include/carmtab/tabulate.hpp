#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "carmtab/cd_method.hpp"
#include "carmtab/completion.hpp"
#include "carmtab/preproduct.hpp"
#include "carmtab/record.hpp"

namespace carmtab {

enum class Strategy { BruteForce, PinchLevels, Hybrid, Optimal };

std::optional<Strategy> parse_strategy(const std::string& name);
const char* strategy_name(Strategy s);

// The recursive branch rule is a heuristic; either branch alone yields a
// correct tabulation, which ForceSieve/ForceRecurse exercise.
enum class BranchMode { Auto, ForceSieve, ForceRecurse };

struct TabulateConfig {
    BranchMode branch = BranchMode::Auto;
    SieveConfig sieve;
    QueryOptions query;
    double delta = 0.2;            // optimal strategy split parameter, 0 < delta < 1/2
    u128 base_floor = 10000;       // optimal strategy recursion floor (brute force below)
    unsigned workers = 1;
    PqrStrategy pqr = PqrStrategy::Auto;
};

struct TabulationResult {
    u128 bound = 0;
    u128 crossover = 0;
    std::string strategy;
    std::vector<CarmichaelRecord> records;  // ascending, duplicate-free
    Counters counters;
};

// One job of the recursive tabulation: preproducts with room for three
// or more appended primes either lambda-sieve directly (P*lambda^2 > B)
// or extend prime by prime, closing with single prime completion for the
// last one or two primes once P has crossed X.
std::vector<CarmichaelRecord> hybrid(const Preproduct& pre, u128 B, u128 X,
                                     const PrimeTable& table, const TabulateConfig& cfg,
                                     Counters& counters);

// Exhaustive reference tabulation: factor every odd n < B by a segmented
// smallest-prime sieve and apply Korselt directly. Self-contained on
// purpose; shares nothing with the sieving/completion machinery.
// B <= 10^9.
std::vector<CarmichaelRecord> brute_force_oracle(u128 B);

// The three-set tabulation: recurse below B^(1-delta); lambda-sieve every
// prime in (B^delta, sqrt(B)]; lambda-sieve the B^delta-smooth cyclic
// preproducts of (T1/S, T1]. Merged, sorted, deduplicated.
TabulationResult optimal(u128 B, const TabulateConfig& cfg);

// Full run for a strategy; deterministic output for any worker count.
TabulationResult run(u128 B, u128 X, Strategy strategy, const TabulateConfig& cfg);

// Result file: one `n: p1 p2 ... pd` line per record, ascending, then a
// `# count=... jobs=... sieves=... spc=... ladders=...` summary line.
void write_result(std::ostream& os, const TabulationResult& result);
// Records only (the summary line is ignored). nullopt on malformed input.
std::optional<std::vector<CarmichaelRecord>> read_result(std::istream& is);

}  // namespace carmtab
