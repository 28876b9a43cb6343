#include "carmtab/cd_method.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace carmtab {

namespace {

constexpr u64 interval_window_max = u64(1) << 22;

struct PqrContext {
    const Preproduct& pre;
    u128 B;
    u128 P;
    u64 p;
    Factorization pm1_factors;                 // P - 1
    std::optional<FactoredInterval> interval;  // [P+2, 2P-1], built on demand
    std::vector<CarmichaelRecord> out;
};

// Factorization of P + D: from the shared interval when it fits the
// window budget, otherwise factored directly.
Factorization factor_pd(PqrContext& ctx, u128 pd) {
    u128 Pv = ctx.P;
    if (Pv - 2 <= interval_window_max && Pv < (u128(1) << 62)) {
        if (!ctx.interval) {
            ctx.interval = factor_interval(static_cast<u64>(Pv + 2), static_cast<u64>(2 * Pv - 1));
        }
        return ctx.interval->at(static_cast<u64>(pd));
    }
    return pollard_factor(pd);
}

u128 divisor_count_merged(const Factorization& a, const Factorization& b) {
    u128 c = 1;
    for (const auto& [p, e] : a.factors) {
        (void)p;
        c *= e + 1;
    }
    for (const auto& [p, e] : b.factors) {
        (void)p;
        c *= e + 1;
    }
    return c;  // upper bound: shared primes counted twice
}

void merged_divisors(const Factorization& a, const Factorization& b, std::vector<u128>& out) {
    std::vector<std::pair<u128, unsigned>> merged;
    for (const auto& f : a.factors) merged.push_back(f);
    for (const auto& f : b.factors) {
        auto it = std::find_if(merged.begin(), merged.end(),
                               [&](const auto& m) { return m.first == f.first; });
        if (it != merged.end()) it->second += f.second;
        else merged.push_back(f);
    }
    out.clear();
    out.push_back(1);
    for (const auto& [p, e] : merged) {
        std::size_t base = out.size();
        u128 pk = 1;
        for (unsigned i = 1; i <= e; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
        }
    }
}

void try_candidate(PqrContext& ctx, u128 D, u128 C, u128 delta) {
    u128 P = ctx.P;
    u128 num_q = (P - 1) * (P + D);
    if (num_q % delta != 0) return;
    u128 q = num_q / delta + 1;
    u128 num_r = (P - 1) * (P + C);
    if (num_r % delta != 0) return;
    u128 r = num_r / delta + 1;
    if (q <= ctx.p || r <= q) return;
    u128 n;
    if (mul_overflows(P, q, n) || mul_overflows(n, r, n) || n >= ctx.B) return;
    if (gcd(q - 1, P) != 1 || gcd(r - 1, P) != 1 || gcd(r - 1, q) != 1) return;
    if (!is_prime(q) || !is_prime(r)) return;
    Factorization f;
    f.value = n;
    for (u64 pp : ctx.pre.primes) f.factors.emplace_back(pp, 1);
    f.factors.emplace_back(q, 1);
    f.factors.emplace_back(r, 1);
    if (!korselt_check(f)) return;
    ctx.out.push_back(make_record(f));
}

void scan_divisor_path(PqrContext& ctx, u128 D, const Factorization& pd_factors) {
    u128 P = ctx.P;
    std::vector<u128> divisors;
    merged_divisors(ctx.pm1_factors, pd_factors, divisors);
    std::sort(divisors.begin(), divisors.end());
    divisors.erase(std::unique(divisors.begin(), divisors.end()), divisors.end());
    u128 two_p2 = 2 * P * P;
    for (u128 delta : divisors) {
        // C*D = P^2 + Delta must stay below P^2 (p+3)/(p+1).
        if (delta * (ctx.p + 1) >= two_p2) break;
        u128 cd = P * P + delta;
        if (cd % D != 0) continue;
        try_candidate(ctx, D, cd / D, delta);
    }
}

void scan_c_path(PqrContext& ctx, u128 D) {
    u128 P = ctx.P;
    u128 p2 = P * P;
    u128 hi_num = p2 * (ctx.p + 3);
    for (u128 C = p2 / D + 1; C * D * (ctx.p + 1) < hi_num; ++C) {
        try_candidate(ctx, D, C, C * D - p2);
    }
}

}  // namespace

std::vector<CarmichaelRecord> tabulate_pqr(const Preproduct& pre, u128 B, PqrStrategy strategy) {
    if (pre.P < 3) return {};
    if (pre.P >= (u128(1) << 40)) throw std::length_error("tabulate_pqr: P too large for the small case");
    PqrContext ctx{pre, B, pre.P, pre.p, pollard_factor(pre.P - 1), std::nullopt, {}};
    u128 P = pre.P;
    for (u128 D = 2; D < P; ++D) {
        bool use_divisors;
        Factorization pd_factors;
        switch (strategy) {
            case PqrStrategy::DivisorPath:
                use_divisors = true;
                break;
            case PqrStrategy::CPath:
                use_divisors = false;
                break;
            case PqrStrategy::Auto:
            default: {
                // C-interval length vs divisor count; ties go to the C scan.
                u128 c_len = 2 * P * P / (D * (ctx.p + 1)) + 1;
                pd_factors = factor_pd(ctx, P + D);
                use_divisors = divisor_count_merged(ctx.pm1_factors, pd_factors) < c_len;
                break;
            }
        }
        if (use_divisors) {
            if (strategy != PqrStrategy::Auto) pd_factors = factor_pd(ctx, P + D);
            scan_divisor_path(ctx, D, pd_factors);
        } else {
            scan_c_path(ctx, D);
        }
    }
    std::sort(ctx.out.begin(), ctx.out.end());
    ctx.out.erase(std::unique(ctx.out.begin(), ctx.out.end()), ctx.out.end());
    return ctx.out;
}

std::vector<CarmichaelRecord> tabulate_small_case(u128 B, u128 X, PqrStrategy strategy) {
    std::vector<CarmichaelRecord> out;
    if (X < 3) return out;
    u64 limit = X > (u128(1) << 31) ? (u64(1) << 31) : static_cast<u64>(X);
    PrimeTable table = sieve_primes(limit);
    enumerate_cyclic(X, table, [&](const Preproduct& pre) {
        auto recs = tabulate_pqr(pre, B, strategy);
        out.insert(out.end(), recs.begin(), recs.end());
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace carmtab
