#include "carmtab/completion.hpp"

#include <algorithm>
#include <stdexcept>

namespace carmtab {

u64 LambdaSieveJob::survivor_count() const {
    u64 c = 0;
    for (bool s : survivors) c += s ? 1 : 0;
    return c;
}

Marking solve_progression(const SieveRule& rule, u128 r_star, u128 lambda) {
    u128 m = rule.modulus;
    if (m < 2) throw std::invalid_argument("solve_progression: modulus must be >= 2");
    u128 L = lambda % m;
    u128 R0 = r_star % m;
    if (L == 0) {
        return {R0 == 0 ? Marking::Kind::All : Marking::Kind::None, 0, 0};
    }
    u128 g = gcd(L, m);
    if (R0 % g != 0) return {Marking::Kind::None, 0, 0};
    // L*k == -R0 (mod m) reduces to k == -(R0/g) * (L/g)^-1 (mod m/g).
    u128 mg = m / g;
    u128 Lg = (L / g) % mg;
    u128 Rg = (R0 / g) % mg;
    if (mg == 1) return {Marking::Kind::All, 0, 0};
    u128 inv = *inv_mod(Lg, mg);
    u128 neg = (mg - Rg) % mg;
    u128 k0 = mul_mod(neg, inv, mg);
    return {Marking::Kind::Progression, k0, mg};
}

std::vector<SieveRule> build_rules(const Preproduct& pre, const PrimeTable& table,
                                   const SieveConfig& cfg) {
    std::vector<SieveRule> rules;
    u64 b = pre.b > table.limit ? table.limit : static_cast<u64>(pre.b);
    for (u64 q : table.primes) {
        if (q > b) break;
        rules.push_back({q, RuleKind::SmallPrime});
    }
    u64 inadmissible_limit = std::max(b, cfg.inadmissible_prime_limit);
    if (inadmissible_limit > table.limit) inadmissible_limit = table.limit;
    for (std::size_t i = table.first_above(b); i < table.primes.size(); ++i) {
        u64 q = table.primes[i];
        if (q > inadmissible_limit) break;
        if (!is_admissible(q, pre)) rules.push_back({q, RuleKind::InadmissiblePrime});
    }
    for (u64 q : table.primes) {
        if (q * q > cfg.square_cap) break;
        rules.push_back({u128(q) * q, RuleKind::PrimeSquare});
    }
    for (u64 q : table.primes) {
        u64 partner = 2 * q + 1;
        if (q * partner > cfg.product_cap) break;
        if (partner <= table.limit ? std::binary_search(table.primes.begin(), table.primes.end(), partner)
                                   : is_prime(partner)) {
            rules.push_back({u128(q) * partner, RuleKind::InadmissibleProduct});
        }
    }
    return rules;
}

namespace {

// kmax for n = P*(r* + k*lambda) < B, or "empty".
bool k_range(const Preproduct& pre, u128 B, u128 rs, u128& kmax) {
    if (B <= pre.P) return false;
    u128 lim = (B - 1) / pre.P;  // largest R with P*R < B
    if (lim < rs) return false;
    kmax = (lim - rs) / pre.lambda;
    return true;
}

// First k >= from in the progression k0 + t*step.
u128 progression_start(u128 k0, u128 step, u128 from) {
    if (k0 >= from) return k0;
    u128 delta = from - k0;
    return k0 + ((delta + step - 1) / step) * step;
}

}  // namespace

LambdaSieveJob build_sieve_job(const Preproduct& pre, u128 B,
                               const std::vector<SieveRule>& rules, const SieveConfig& cfg) {
    if (pre.P <= 1) throw std::invalid_argument("build_sieve_job: requires P > 1");
    LambdaSieveJob job;
    job.pre = pre;
    job.B = B;
    job.r_star = r_star(pre);
    u128 kmax;
    if (!k_range(pre, B, job.r_star, kmax)) return job;
    if (kmax + 1 > cfg.chunk_bits) throw std::length_error("build_sieve_job: k range exceeds memory budget");
    job.empty = false;
    job.kmax = kmax;
    job.survivors.assign(static_cast<std::size_t>(kmax + 1), true);
    for (const SieveRule& rule : rules) {
        Marking m = solve_progression(rule, job.r_star, pre.lambda);
        if (m.kind == Marking::Kind::None) continue;
        if (m.kind == Marking::Kind::All) {
            job.survivors.assign(job.survivors.size(), false);
            break;
        }
        for (u128 k = m.k0; k <= kmax; k += m.step) {
            job.survivors[static_cast<std::size_t>(k)] = false;
        }
    }
    return job;
}

std::vector<CarmichaelRecord> lambda_sieve(const Preproduct& pre, u128 B,
                                           const PrimeTable& table, const SieveConfig& cfg,
                                           const QueryOptions& qopts, Counters* counters) {
    if (pre.P <= 1) throw std::invalid_argument("lambda_sieve: requires P > 1");
    if (counters) ++counters->sieve_calls;
    std::vector<CarmichaelRecord> out;
    u128 rs = r_star(pre);
    u128 kmax;
    if (!k_range(pre, B, rs, kmax)) return out;
    std::vector<SieveRule> rules = build_rules(pre, table, cfg);
    std::vector<Marking> markings;
    markings.reserve(rules.size());
    bool all_cleared = false;
    for (const SieveRule& rule : rules) {
        Marking m = solve_progression(rule, rs, pre.lambda);
        if (m.kind == Marking::Kind::All) {
            all_cleared = true;
            break;
        }
        if (m.kind == Marking::Kind::Progression) markings.push_back(m);
    }
    if (all_cleared) return out;

    QueryStats qs;
    std::vector<bool> chunk;
    for (u128 lo = 0; lo <= kmax; lo += cfg.chunk_bits) {
        u128 hi = std::min<u128>(kmax, lo + cfg.chunk_bits - 1);
        std::size_t size = static_cast<std::size_t>(hi - lo + 1);
        chunk.assign(size, true);
        for (const Marking& m : markings) {
            for (u128 k = progression_start(m.k0, m.step, lo); k <= hi; k += m.step) {
                chunk[static_cast<std::size_t>(k - lo)] = false;
            }
        }
        for (std::size_t i = 0; i < size; ++i) {
            if (!chunk[i]) continue;
            u128 R = rs + (lo + i) * pre.lambda;
            if (R == 1) continue;  // n = P itself; a shorter preproduct covers it
            u128 n = pre.P * R;
            QueryVerdict v = is_carmichael(n, pre, pre.b, qopts, &qs);
            if (v.carmichael()) out.push_back(make_record(v.factorization));
        }
        if (hi == kmax) break;  // guard against u128 wrap on lo += chunk
    }
    if (counters) counters->ladders += qs.ladders;
    return out;
}

namespace {

void collect_divisors(const Factorization& f, std::vector<u128>& out) {
    out.clear();
    out.push_back(1);
    for (const auto& [p, e] : f.factors) {
        std::size_t base = out.size();
        u128 pk = 1;
        for (unsigned i = 1; i <= e; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
        }
    }
}

u128 divisor_count(const Factorization& f) {
    u128 c = 1;
    for (const auto& [p, e] : f.factors) {
        (void)p;
        c *= e + 1;
    }
    return c;
}

}  // namespace

std::vector<CarmichaelRecord> single_prime_completion(const Preproduct& pre, u128 B,
                                                      Counters* counters) {
    if (pre.P <= 1) throw std::invalid_argument("single_prime_completion: requires P > 1");
    if (counters) ++counters->spc_calls;
    std::vector<CarmichaelRecord> out;
    if (B <= pre.P) return out;
    u128 rs = r_star(pre);
    // (r-1) | (P-1) forces r <= P; P*r < B forces r <= (B-1)/P.
    u128 hi = std::min((B - 1) / pre.P, pre.P);
    if (hi < 2 || hi < rs) return out;
    u128 class_count = (hi - rs) / pre.lambda + 1;

    auto emit = [&](u64 r) {
        Factorization f;
        f.value = pre.P * r;
        for (u64 p : pre.primes) f.factors.emplace_back(p, 1);
        f.factors.emplace_back(r, 1);
        out.push_back(make_record(f));
    };
    auto candidate_ok = [&](u128 r) {
        if (r <= pre.b || r < 2 || r > hi) return false;
        if ((r % pre.lambda) != (rs % pre.lambda)) return false;
        if ((pre.P - 1) % (r - 1) != 0) return false;
        if (!is_prime(r)) return false;
        return is_admissible(static_cast<u64>(r), pre);
    };

    constexpr u64 factor_budget = u64(1) << 22;
    auto factored = pollard_factor_budgeted(pre.P - 1, factor_budget);
    if (factored && divisor_count(*factored) <= class_count) {
        std::vector<u128> divisors;
        collect_divisors(*factored, divisors);
        std::sort(divisors.begin(), divisors.end());
        for (u128 d : divisors) {
            u128 r = d + 1;
            if (candidate_ok(r)) emit(static_cast<u64>(r));
        }
    } else {
        for (u128 r = rs; r <= hi; r += pre.lambda) {
            if (candidate_ok(r)) emit(static_cast<u64>(r));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace carmtab
