#include "carmtab/tabulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace carmtab {

std::optional<Strategy> parse_strategy(const std::string& name) {
    if (name == "bruteforce") return Strategy::BruteForce;
    if (name == "pinch-levels") return Strategy::PinchLevels;
    if (name == "hybrid") return Strategy::Hybrid;
    if (name == "optimal") return Strategy::Optimal;
    return std::nullopt;
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::BruteForce: return "bruteforce";
        case Strategy::PinchLevels: return "pinch-levels";
        case Strategy::Hybrid: return "hybrid";
        case Strategy::Optimal: return "optimal";
    }
    return "?";
}

namespace {

void append(std::vector<CarmichaelRecord>& dst, std::vector<CarmichaelRecord>&& src) {
    dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

void sort_dedup(std::vector<CarmichaelRecord>& recs) {
    std::sort(recs.begin(), recs.end());
    recs.erase(std::unique(recs.begin(), recs.end()), recs.end());
}

}  // namespace

std::vector<CarmichaelRecord> hybrid(const Preproduct& pre, u128 B, u128 X,
                                     const PrimeTable& table, const TabulateConfig& cfg,
                                     Counters& counters) {
    bool sieve_branch = false;
    switch (cfg.branch) {
        case BranchMode::Auto: {
            u128 l2, pl2;
            sieve_branch = pre.P > 1 && (mul_overflows(pre.lambda, pre.lambda, l2) ||
                                         mul_overflows(pre.P, l2, pl2) || pl2 > B);
            break;
        }
        case BranchMode::ForceSieve:
            sieve_branch = pre.P > 1;
            break;
        case BranchMode::ForceRecurse:
            sieve_branch = false;
            break;
    }
    if (sieve_branch) {
        return lambda_sieve(pre, B, table, cfg.sieve, cfg.query, &counters);
    }

    std::vector<CarmichaelRecord> out;
    std::size_t start = pre.b >= table.limit ? table.primes.size()
                                             : table.first_above(static_cast<u64>(pre.b));
    for (std::size_t i = start; i < table.primes.size(); ++i) {
        u64 q = table.primes[i];
        u128 q2, q3, pq2, pq3;
        bool q3_over = mul_overflows(u128(q), q, q2) || mul_overflows(q2, q, q3) ||
                       mul_overflows(pre.P, q3, pq3);
        if (!q3_over && pq3 <= B) {
            // room for at least three appended primes: recurse on P*q
            if (is_admissible(q, pre)) {
                append(out, hybrid(extend(pre, q), B, X, table, cfg, counters));
            }
            continue;
        }
        if (pre.P <= X) break;
        if (mul_overflows(pre.P, q2, pq2) || pq2 >= B) break;
        // exactly two primes fit: P*q takes single prime completion
        if (is_admissible(q, pre)) {
            append(out, single_prime_completion(extend(pre, q), B, &counters));
        }
    }
    if (pre.P > X) {
        u128 px;
        if (!mul_overflows(u128(pre.p), X, px) && pre.P > px) {
            append(out, single_prime_completion(pre, B, &counters));
        }
    }
    return out;
}

std::vector<CarmichaelRecord> brute_force_oracle(u128 B) {
    if (B > pow10_u128(9)) throw std::length_error("brute_force_oracle: bound exceeds the 10^9 budget");
    std::vector<CarmichaelRecord> out;
    if (B <= 3) return out;
    const u64 bound = static_cast<u64>(B);  // tabulate n < bound

    // Local prime list up to sqrt(bound-1); the oracle shares nothing
    // with the sieving machinery by design.
    const u64 root = static_cast<u64>(integer_sqrt(u128(bound - 1)));
    std::vector<u64> primes;
    {
        std::vector<bool> composite(root + 1, false);
        for (u64 i = 2; i <= root; ++i) {
            if (composite[i]) continue;
            primes.push_back(i);
            for (u64 j = i * i; j <= root; j += i) composite[j] = true;
        }
    }

    const u64 chunk_odds = u64(1) << 20;
    std::vector<u64> rem(chunk_odds);
    std::vector<unsigned char> omega(chunk_odds), flags(chunk_odds);
    constexpr unsigned char kOk = 1, kSquarefree = 2;

    for (u64 lo = 3; lo < bound; lo += 2 * chunk_odds) {
        u64 count = std::min(chunk_odds, (bound - lo + 1) / 2);
        if (count == 0) break;
        u64 hi = lo + 2 * (count - 1);  // last odd n in this chunk
        for (u64 i = 0; i < count; ++i) {
            rem[i] = lo + 2 * i;
            omega[i] = 0;
            flags[i] = kOk | kSquarefree;
        }
        for (u64 p : primes) {
            if (p == 2) continue;
            if (p > hi) break;
            u64 m = ((lo + p - 1) / p) * p;
            if (m % 2 == 0) m += p;
            for (; m <= hi; m += 2 * p) {
                u64 i = (m - lo) / 2;
                unsigned e = 0;
                while (rem[i] % p == 0) {
                    rem[i] /= p;
                    ++e;
                }
                if (e >= 2) flags[i] &= ~kSquarefree;
                if ((m - 1) % (p - 1) != 0) flags[i] &= ~kOk;
                if (omega[i] < 250) ++omega[i];
                if (m > hi - 2 * p) break;  // u64 wrap guard
            }
        }
        for (u64 i = 0; i < count; ++i) {
            u64 n = lo + 2 * i;
            unsigned om = omega[i];
            if (rem[i] > 1) {
                ++om;
                if ((n - 1) % (rem[i] - 1) != 0) flags[i] &= ~kOk;
            }
            if ((flags[i] & kOk) && (flags[i] & kSquarefree) && om >= 3) {
                // Re-factor the hit by trial division and let the record
                // constructor re-verify Korselt.
                Factorization f;
                f.value = n;
                u64 m = n;
                for (u64 p : primes) {
                    if (p * p > m) break;
                    unsigned e = 0;
                    while (m % p == 0) {
                        m /= p;
                        ++e;
                    }
                    if (e) f.factors.emplace_back(p, e);
                }
                if (m > 1) f.factors.emplace_back(m, 1);
                out.push_back(make_record(f));
            }
        }
    }
    return out;
}

namespace {

// Work pool: items are processed in index order per worker with results
// keyed by item, so the merged output is schedule-independent even
// before the final sort.
template <typename Item, typename Fn>
std::pair<std::vector<CarmichaelRecord>, Counters> run_pool(const std::vector<Item>& items,
                                                            unsigned workers, Fn&& fn) {
    std::vector<std::vector<CarmichaelRecord>> results(items.size());
    std::vector<Counters> counters(std::max<unsigned>(workers, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i], counters[0]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= items.size()) break;
                    results[i] = fn(items[i], counters[w]);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    std::vector<CarmichaelRecord> merged;
    Counters total;
    for (auto& r : results) append(merged, std::move(r));
    for (const Counters& c : counters) total += c;
    return {std::move(merged), total};
}

u128 float_threshold(u128 B, double exponent, u128 lo, u128 hi) {
    long double v = powl(static_cast<long double>(B), static_cast<long double>(exponent));
    u128 t = v < 1.0L ? u128(1) : static_cast<u128>(v);
    return std::clamp(t, lo, hi);
}

}  // namespace

TabulationResult optimal(u128 B, const TabulateConfig& cfg) {
    if (!(cfg.delta > 0.0 && cfg.delta < 0.5)) throw std::invalid_argument("optimal: delta must be in (0, 1/2)");
    TabulationResult result;
    result.bound = B;
    result.strategy = "optimal";
    if (B <= cfg.base_floor || B < 16) {
        result.records = brute_force_oracle(B);
        return result;
    }

    // The thresholds only partition the work; any choice with
    // T2 = floor(T1/S) is covered, so a floating-point pick is safe.
    u128 T1 = float_threshold(B, 1.0 - cfg.delta, 2, B - 1);
    u128 S128 = float_threshold(B, cfg.delta, 3, B);
    u64 S = S128 > UINT64_MAX ? UINT64_MAX : static_cast<u64>(S128);
    u128 T2 = T1 / S;

    // set 1: everything below T1, recursively
    TabulationResult small = optimal(T1, cfg);
    result.records = std::move(small.records);
    result.counters += small.counters;

    u64 root = static_cast<u64>(integer_sqrt(B));
    PrimeTable table = sieve_primes(std::max<u64>(root, 3));

    // set 2: one lambda-sieve per prime in (S, sqrt(B)]; the prime need
    // not be the smallest factor of a hit, so the append floor is 1.
    std::vector<Preproduct> set2;
    for (std::size_t i = table.first_above(S); i < table.primes.size(); ++i) {
        set2.push_back(single_prime_preproduct(table.primes[i], 1));
    }
    auto [rec2, cnt2] = run_pool(set2, cfg.workers, [&](const Preproduct& pre, Counters& c) {
        ++c.jobs;
        return lambda_sieve(pre, B, table, cfg.sieve, cfg.query, &c);
    });
    append(result.records, std::move(rec2));
    result.counters += cnt2;

    // set 3: S-smooth cyclic preproducts in (T1/S, T1]. Each smooth hit
    // n > T1 has a divisor here (its largest prefix at or below T1), and
    // the prefix's cofactor is unrestricted from its viewpoint: floor 1.
    std::vector<Preproduct> set3;
    if (T2 < T1) {
        enumerate_smooth_cyclic(T2, T1, S, B, table, [&](const Preproduct& pre) {
            Preproduct relaxed = pre;
            relaxed.b = 1;
            set3.push_back(std::move(relaxed));
        });
    }
    auto [rec3, cnt3] = run_pool(set3, cfg.workers, [&](const Preproduct& pre, Counters& c) {
        ++c.jobs;
        return lambda_sieve(pre, B, table, cfg.sieve, cfg.query, &c);
    });
    append(result.records, std::move(rec3));
    result.counters += cnt3;

    sort_dedup(result.records);
    return result;
}

TabulationResult run(u128 B, u128 X, Strategy strategy, const TabulateConfig& cfg) {
    TabulationResult result;
    result.bound = B;
    result.crossover = X;
    result.strategy = strategy_name(strategy);
    switch (strategy) {
        case Strategy::BruteForce:
            result.records = brute_force_oracle(B);
            return result;
        case Strategy::Optimal: {
            TabulationResult r = optimal(B, cfg);
            r.crossover = X;
            return r;
        }
        case Strategy::PinchLevels:
        case Strategy::Hybrid:
            break;
    }

    TabulateConfig local = cfg;
    if (strategy == Strategy::PinchLevels) local.branch = BranchMode::ForceRecurse;

    u64 root = static_cast<u64>(integer_sqrt(B));
    PrimeTable table = sieve_primes(std::max<u64>(root, 3));

    struct WorkItem {
        enum class Kind { SmallCase, HybridJob } kind;
        Preproduct pre;
    };
    std::vector<WorkItem> items;
    if (X >= 3) {
        u64 limit = X > table.limit ? table.limit : static_cast<u64>(X);
        PrimeTable small_table = sieve_primes(std::max<u64>(limit, 3));
        enumerate_cyclic(X, small_table, [&](const Preproduct& pre) {
            items.push_back({WorkItem::Kind::SmallCase, pre});
        });
    }
    for (Preproduct& job : generate_jobs(B, X)) {
        items.push_back({WorkItem::Kind::HybridJob, std::move(job)});
    }

    auto [records, counters] = run_pool(items, local.workers, [&](const WorkItem& item, Counters& c) {
        if (item.kind == WorkItem::Kind::SmallCase) {
            return tabulate_pqr(item.pre, B, local.pqr);
        }
        ++c.jobs;
        return hybrid(item.pre, B, X, table, local, c);
    });
    result.records = std::move(records);
    result.counters = counters;
    sort_dedup(result.records);
    return result;
}

void write_result(std::ostream& os, const TabulationResult& result) {
    for (const CarmichaelRecord& rec : result.records) {
        os << to_string(rec.n) << ':';
        for (u64 p : rec.primes) os << ' ' << p;
        os << '\n';
    }
    os << "# count=" << result.records.size() << " strategy=" << result.strategy
       << " jobs=" << result.counters.jobs << " sieves=" << result.counters.sieve_calls
       << " spc=" << result.counters.spc_calls << " ladders=" << result.counters.ladders << '\n';
}

std::optional<std::vector<CarmichaelRecord>> read_result(std::istream& is) {
    std::vector<CarmichaelRecord> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) return std::nullopt;
        auto n = parse_u128(line.substr(0, colon));
        if (!n) return std::nullopt;
        CarmichaelRecord rec;
        rec.n = *n;
        std::istringstream rest(line.substr(colon + 1));
        std::string tok;
        while (rest >> tok) {
            auto p = parse_u128(tok);
            if (!p || *p > UINT64_MAX) return std::nullopt;
            rec.primes.push_back(static_cast<u64>(*p));
        }
        if (rec.primes.empty()) return std::nullopt;
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace carmtab
