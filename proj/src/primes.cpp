#include "carmtab/primes.hpp"

#include <algorithm>
#include <stdexcept>

namespace carmtab {

namespace {

constexpr u64 sieve_limit_max = u64(1) << 31;
constexpr u64 interval_limit_max = u64(1) << 24;

// Deterministic for all n < 2^64 (Sinclair base set).
constexpr u64 bases_64[] = {2, 325, 9375, 28178, 450775, 9780504, 1795265022};
// First 13 primes: deterministic for n < is_prime_limit.
constexpr u64 bases_wide[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};

constexpr u64 trial_primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

bool strong_probable_prime(u128 n, u128 d, unsigned s, u128 a) {
    a %= n;
    if (a == 0) return true;
    u128 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned i = 1; i < s; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace

std::size_t PrimeTable::first_above(u64 x) const {
    return static_cast<std::size_t>(std::upper_bound(primes.begin(), primes.end(), x) - primes.begin());
}

PrimeTable sieve_primes(u64 limit) {
    if (limit < 2) throw std::invalid_argument("sieve_primes: limit must be >= 2");
    if (limit > sieve_limit_max) throw std::length_error("sieve_primes: limit exceeds memory budget");
    PrimeTable table;
    table.limit = limit;
    std::vector<bool> composite(limit + 1, false);
    for (u64 i = 2; i * i <= limit; ++i) {
        if (composite[i]) continue;
        for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
    }
    for (u64 i = 2; i <= limit; ++i) {
        if (!composite[i]) table.primes.push_back(i);
    }
    return table;
}

FactoredInterval factor_interval(u64 lo, u64 hi) {
    if (lo < 1) throw std::invalid_argument("factor_interval: lo must be >= 1");
    if (hi < lo) throw std::invalid_argument("factor_interval: hi < lo");
    if (hi - lo + 1 > interval_limit_max) throw std::length_error("factor_interval: window too large");

    FactoredInterval out;
    out.lo = lo;
    out.hi = hi;
    const std::size_t count = static_cast<std::size_t>(hi - lo + 1);
    out.entries.resize(count);
    std::vector<u64> rem(count);
    for (std::size_t i = 0; i < count; ++i) {
        rem[i] = lo + i;
        out.entries[i].value = lo + i;
    }
    u64 root = static_cast<u64>(integer_sqrt(u128(hi)));
    if (root >= 2) {
        PrimeTable table = sieve_primes(root);
        for (u64 p : table.primes) {
            u64 start = ((lo + p - 1) / p) * p;
            for (u64 m = start; m <= hi; m += p) {
                std::size_t i = static_cast<std::size_t>(m - lo);
                unsigned e = 0;
                while (rem[i] % p == 0) {
                    rem[i] /= p;
                    ++e;
                }
                if (e > 0) out.entries[i].factors.emplace_back(p, e);
                if (m > hi - p) break;  // avoid u64 wrap near 2^64
            }
        }
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (rem[i] > 1) out.entries[i].factors.emplace_back(rem[i], 1);
    }
    return out;
}

bool is_prime(u128 n) {
    if (n >= is_prime_limit) throw std::domain_error("is_prime: n out of certified range");
    if (n < 2) return false;
    for (u64 p : trial_primes) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    u128 d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    if (n <= u128(UINT64_MAX)) {
        for (u64 a : bases_64) {
            if (!strong_probable_prime(n, d, s, a)) return false;
        }
    } else {
        for (u64 a : bases_wide) {
            if (!strong_probable_prime(n, d, s, a)) return false;
        }
    }
    return true;
}

namespace {

u128 abs_diff(u128 a, u128 b) { return a > b ? a - b : b - a; }

// Brent's cycle detection with batched gcds. Returns a nontrivial factor
// of composite n, or 0 when the budget ran out / this c failed.
u128 rho_brent(u128 n, u64 c, u64& budget, bool limited) {
    const u64 batch = 128;
    u128 y = 2, g = 1, q = 1, x = 0, ys = 0;
    u64 r = 1;
    auto step = [&](u128 t) { return (mul_mod(t, t, n) + c) % n; };
    while (g == 1) {
        x = y;
        for (u64 i = 0; i < r; ++i) y = step(y);
        u64 k = 0;
        while (k < r && g == 1) {
            ys = y;
            u64 lim = std::min(batch, r - k);
            for (u64 i = 0; i < lim; ++i) {
                y = step(y);
                q = mul_mod(q, abs_diff(x, y), n);
            }
            g = gcd(q, n);
            k += lim;
            if (limited) {
                if (budget <= lim) return 0;
                budget -= lim;
            }
        }
        r *= 2;
    }
    if (g == n) {
        // The batch jumped past the factor; replay one step at a time.
        do {
            ys = step(ys);
            g = gcd(abs_diff(x, ys), n);
        } while (g == 1);
    }
    return g == n ? 0 : g;
}

bool factor_into(u128 n, std::vector<std::pair<u128, unsigned>>& out, u64& budget, bool limited) {
    std::vector<u128> stack{n};
    while (!stack.empty()) {
        u128 m = stack.back();
        stack.pop_back();
        if (m == 1) continue;
        if (is_prime(m)) {
            out.emplace_back(m, 1);
            continue;
        }
        u128 d = 0;
        for (u64 c = 1; d == 0; ++c) {
            if (limited && budget == 0) return false;
            d = rho_brent(m, c, budget, limited);
            if (!limited && c > 64) {
                // Practically unreachable; rho with fresh increments
                // always splits these composites.
                throw std::runtime_error("pollard_factor: rho failed repeatedly");
            }
            if (limited && c > 64) return false;
        }
        stack.push_back(d);
        stack.push_back(m / d);
    }
    return true;
}

Factorization assemble(u128 n, std::vector<std::pair<u128, unsigned>> parts) {
    std::sort(parts.begin(), parts.end());
    Factorization f;
    f.value = n;
    for (const auto& [p, e] : parts) {
        if (!f.factors.empty() && f.factors.back().first == p) {
            f.factors.back().second += e;
        } else {
            f.factors.emplace_back(p, e);
        }
    }
    return f;
}

void strip_small(u128& m, std::vector<std::pair<u128, unsigned>>& parts) {
    static const PrimeTable small = sieve_primes(4096);
    for (u64 p : small.primes) {
        if (u128(p) * p > m) break;
        unsigned e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        if (e > 0) parts.emplace_back(p, e);
    }
}

}  // namespace

Factorization pollard_factor(u128 n) {
    if (n < 2) throw std::invalid_argument("pollard_factor: n must be >= 2");
    std::vector<std::pair<u128, unsigned>> parts;
    u128 m = n;
    strip_small(m, parts);
    if (m > 1) {
        u64 budget = 0;
        factor_into(m, parts, budget, false);
    }
    return assemble(n, std::move(parts));
}

std::optional<Factorization> pollard_factor_budgeted(u128 n, u64 max_iterations) {
    if (n < 2) throw std::invalid_argument("pollard_factor_budgeted: n must be >= 2");
    std::vector<std::pair<u128, unsigned>> parts;
    u128 m = n;
    strip_small(m, parts);
    if (m > 1) {
        u64 budget = max_iterations;
        if (!factor_into(m, parts, budget, true)) return std::nullopt;
    }
    return assemble(n, std::move(parts));
}

}  // namespace carmtab
