#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace carmtab {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// Working range of exact integer values. Everything a tabulation to
// B <= 10^24 can produce (bounds, candidates, lambda values, products
// used in interval comparisons) stays below 2^127.
inline constexpr u128 wide_max = (u128(1) << 127) - 1;

// Largest modulus mul_mod/pow_mod accept. n < B <= 10^24 < 2^80,
// so 2^96 leaves headroom.
inline constexpr u128 modulus_max = u128(1) << 96;

std::string to_string(u128 x);
// Accepts decimal digits only; rejects empty input and values > wide_max.
std::optional<u128> parse_u128(std::string_view s);

// 10^e, e <= 38.
u128 pow10_u128(unsigned e);

// false on success; true if a*b or a+b would leave [0, wide_max].
bool mul_overflows(u128 a, u128 b, u128& out);
bool add_overflows(u128 a, u128 b, u128& out);

u128 gcd(u128 a, u128 b);
// Throws std::overflow_error when the result exceeds wide_max.
u128 lcm(u128 a, u128 b);

// Least x in [1, m] with a*x == 1 (mod m); nullopt when gcd(a, m) != 1.
// "Least positive" convention: returns m itself for the residue 0 == m,
// which only happens when m == 1.
std::optional<u128> inv_mod(u128 a, u128 m);

// a*b mod m, exact for every m in [1, 2^96). Inputs are reduced mod m
// first. Throws std::domain_error for m == 0 or m >= 2^96.
u128 mul_mod(u128 a, u128 b, u128 m);

// a^e mod m by square and multiply.
u128 pow_mod(u128 a, u128 e, u128 m);

// The full square-and-multiply ladder for a^e mod m where e = odd * 2^s:
// values[i] = a^(odd * 2^i) mod m for i = 0..s. values.back() is the
// plain power a^e. One ladder yields both the Fermat residue and the
// strong-test sequence.
struct StrongSequence {
    u128 odd = 0;
    unsigned two_exp = 0;
    std::vector<u128> values;

    u128 fermat() const { return values.back(); }
};
StrongSequence pow_mod_strong(u128 a, u128 e, u128 m);

// floor(x^(1/n)) for n in {2, 3}, certified: the result r always
// satisfies r^n <= x < (r+1)^n. A floating-point guess seeds the search;
// the final answer comes from exact integer comparisons only.
u128 integer_nth_root(u128 x, unsigned n);
inline u128 integer_sqrt(u128 x) { return integer_nth_root(x, 2); }
inline u128 integer_cbrt(u128 x) { return integer_nth_root(x, 3); }

// A value with its sorted prime factorization.
struct Factorization {
    u128 value = 1;
    std::vector<std::pair<u128, unsigned>> factors;  // (prime, exponent), primes ascending

    unsigned omega() const { return static_cast<unsigned>(factors.size()); }
    bool squarefree() const;
    // Re-multiplies the factor list and compares with value.
    bool consistent() const;
};

// lambda(2) = 1, lambda(4) = 2, lambda(2^r) = 2^(r-2) for r >= 3,
// lambda(p^r) = p^(r-1)(p-1) for odd p, combined by lcm.
u128 carmichael_lambda(const Factorization& f);

// Squarefree, composite, and (p-1) | (value-1) for every prime p.
bool korselt_check(const Factorization& f);

}  // namespace carmtab
