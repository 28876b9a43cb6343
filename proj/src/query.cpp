#include "carmtab/query.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace carmtab {

const char* reject_reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::FermatWitness: return "fermat-witness";
        case RejectReason::NotSquarefree: return "not-squarefree";
        case RejectReason::KorseltDivisibilityFail: return "korselt-divisibility-fail";
        case RejectReason::InadmissibleFactor: return "inadmissible-factor";
        case RejectReason::FactorTooSmall: return "factor-too-small";
        case RejectReason::Prime: return "prime";
    }
    return "?";
}

bool PartialSplit::consistent() const {
    u128 acc = 1;
    for (u128 c : pending) {
        if (mul_overflows(acc, c, acc)) return false;
    }
    for (u128 f : confirmed) {
        if (mul_overflows(acc, f, acc)) return false;
    }
    if (acc != n) return false;
    for (std::size_t i = 0; i < pending.size(); ++i) {
        for (std::size_t j = i + 1; j < pending.size(); ++j) {
            if (gcd(pending[i], pending[j]) != 1) return false;
        }
        for (u128 f : confirmed) {
            if (gcd(pending[i], f) != 1) return false;
        }
    }
    return true;
}

PartialSplit refine_split(PartialSplit split, u128 x) {
    if (x == 1 || x == split.n - 1 || mul_mod(x, x, split.n) != 1) {
        throw std::invalid_argument("refine_split: x is not a nontrivial square root of 1");
    }
    std::vector<u128> next;
    for (u128 c : split.pending) {
        u128 g = gcd(x - 1, c);
        if (g == 1 || g == c) {
            next.push_back(c);
            continue;
        }
        for (u128 part : {g, c / g}) {
            if (is_prime(part)) {
                split.confirmed.push_back(part);
            } else {
                next.push_back(part);
            }
        }
    }
    split.pending = std::move(next);
    std::sort(split.confirmed.begin(), split.confirmed.end());
    return split;
}

namespace {

struct QueryState {
    u128 n;
    u128 nm1;
    u128 floor_bound;
    std::vector<u128> confirmed;  // known preproduct primes plus discovered ones
    std::vector<u128> pending;    // unclassified or composite cofactors
    bool pending_classified = false;

    QueryVerdict reject(RejectReason why, u128 witness, unsigned bases) const {
        QueryVerdict v;
        v.kind = QueryVerdict::Kind::NotCarmichael;
        v.reason = why;
        v.witness = witness;
        v.bases_tried = bases;
        return v;
    }
};

// Checks a newly discovered prime factor f of the cofactor part and
// moves it to confirmed. Returns a rejection verdict on any failure.
std::optional<QueryVerdict> confirm_prime(QueryState& st, u128 f, unsigned bases) {
    if (f <= st.floor_bound) return st.reject(RejectReason::FactorTooSmall, f, bases);
    if ((st.n / f) % f == 0) return st.reject(RejectReason::NotSquarefree, f, bases);
    for (u128 g : st.confirmed) {
        u128 lo = std::min(f, g), hi = std::max(f, g);
        if (gcd(hi - 1, lo) != 1) return st.reject(RejectReason::InadmissibleFactor, f, bases);
    }
    if (st.nm1 % (f - 1) != 0) return st.reject(RejectReason::KorseltDivisibilityFail, f, bases);
    st.confirmed.push_back(f);
    return std::nullopt;
}

// Classifies a cofactor part: primes go through confirm_prime, composites
// stay pending (after a squarefree cross-check).
std::optional<QueryVerdict> fold_part(QueryState& st, u128 part, unsigned bases) {
    if (part == 1) return std::nullopt;
    if (is_prime(part)) return confirm_prime(st, part, bases);
    for (u128 g : st.confirmed) {
        if (part % g == 0) return st.reject(RejectReason::NotSquarefree, g, bases);
    }
    st.pending.push_back(part);
    return std::nullopt;
}

// Splits pending cofactors by gcd(x - 1, .). Sets touched when any
// cofactor actually refined.
std::optional<QueryVerdict> apply_splitter(QueryState& st, u128 x, bool& touched,
                                           unsigned bases, QueryStats* stats) {
    std::vector<u128> work = std::move(st.pending);
    st.pending.clear();
    for (std::size_t wi = 0; wi < work.size(); ++wi) {
        u128 c = work[wi];
        u128 g = gcd(x - 1, c);
        if (g == 1 || g == c) {
            st.pending.push_back(c);
            continue;
        }
        touched = true;
        if (stats) ++stats->splits;
        u128 other = c / g;
        u128 common = gcd(g, other);
        if (common != 1) {
            // A shared part means its square divides n.
            return st.reject(RejectReason::NotSquarefree, common, bases);
        }
        if (auto v = fold_part(st, g, bases)) return v;
        if (auto v = fold_part(st, other, bases)) return v;
    }
    return std::nullopt;
}

// is_prime every pending part once; done lazily so that Fermat-rejected
// candidates never pay for it.
std::optional<QueryVerdict> classify_pending(QueryState& st, unsigned bases) {
    if (st.pending_classified) return std::nullopt;
    st.pending_classified = true;
    std::vector<u128> work = std::move(st.pending);
    st.pending.clear();
    for (u128 c : work) {
        if (auto v = fold_part(st, c, bases)) return v;
    }
    return std::nullopt;
}

QueryVerdict assemble(QueryState& st, unsigned bases) {
    std::sort(st.confirmed.begin(), st.confirmed.end());
    u128 prod = 1;
    for (u128 f : st.confirmed) {
        if (mul_overflows(prod, f, prod)) throw std::logic_error("is_carmichael: split product overflow");
    }
    if (prod != st.n) throw std::logic_error("is_carmichael: split lost factors");
    Factorization fact;
    fact.value = st.n;
    for (u128 f : st.confirmed) fact.factors.emplace_back(f, 1);
    // The preproduct's own primes were never run through confirm_prime;
    // the full Korselt check covers them.
    for (u128 f : st.confirmed) {
        if (st.nm1 % (f - 1) != 0) {
            return st.reject(RejectReason::KorseltDivisibilityFail, f, bases);
        }
    }
    if (!korselt_check(fact)) throw std::logic_error("is_carmichael: assembled verdict fails Korselt");
    QueryVerdict v;
    v.kind = QueryVerdict::Kind::Carmichael;
    v.factorization = std::move(fact);
    v.bases_tried = bases;
    return v;
}

class BaseSequence {
  public:
    BaseSequence(const QueryOptions& opts, u128 n) : random_(opts.random_bases), n_(n) {
        if (random_) {
            u64 mix = static_cast<u64>(n) ^ static_cast<u64>(n >> 64);
            rng_.seed(opts.seed ^ mix ^ 0x9e3779b97f4a7c15ULL);
        }
    }

    u128 next() {
        if (!random_) {
            static const PrimeTable table = sieve_primes(65536);
            if (index_ >= table.primes.size()) return 0;
            return table.primes[index_++];
        }
        for (int tries = 0; tries < 64; ++tries) {
            u128 a = (u128(rng_()) << 64 | rng_()) % n_;
            if (a > 1 && a != n_ - 1) return a;
        }
        return 0;
    }

  private:
    bool random_;
    u128 n_;
    std::size_t index_ = 0;
    std::mt19937_64 rng_;
};

}  // namespace

QueryVerdict is_carmichael(u128 n, const Preproduct& known, u128 floor_bound,
                           const QueryOptions& opts, QueryStats* stats) {
    if (n < 2) throw std::invalid_argument("is_carmichael: n must be >= 2");
    if (known.P > 1 && n % known.P != 0) throw std::invalid_argument("is_carmichael: P does not divide n");
    u128 R = known.P > 1 ? n / known.P : n;
    if (R <= 1) throw std::invalid_argument("is_carmichael: cofactor R must exceed 1");

    QueryState st;
    st.n = n;
    st.nm1 = n - 1;
    st.floor_bound = floor_bound;
    for (u64 p : known.primes) st.confirmed.push_back(p);
    st.pending.push_back(R);

    if (known.P == 1 && is_prime(n)) {
        return st.reject(RejectReason::Prime, n, 0);
    }

    BaseSequence bases(opts, n);
    unsigned tried = 0;
    while (tried < opts.base_budget && !st.pending.empty()) {
        u128 a = bases.next();
        if (a == 0) break;
        a %= n;
        if (a <= 1 || a == n - 1) {
            ++tried;
            continue;
        }
        ++tried;
        u128 g = gcd(a, n);
        if (g > 1) {
            // The base shares a factor with n. Against pending parts this
            // is a free split; against the known preproduct it is nothing.
            bool touched = false;
            std::vector<u128> work = std::move(st.pending);
            st.pending.clear();
            for (u128 c : work) {
                u128 d = gcd(g, c);
                if (d == 1 || d == c) {
                    st.pending.push_back(c);
                    continue;
                }
                touched = true;
                if (stats) ++stats->splits;
                u128 other = c / d;
                u128 common = gcd(d, other);
                if (common != 1) return st.reject(RejectReason::NotSquarefree, common, tried);
                if (auto v = fold_part(st, d, tried)) return *v;
                if (auto v = fold_part(st, other, tried)) return *v;
            }
            if (!touched) {
                if (auto v = classify_pending(st, tried)) return *v;
            }
            continue;
        }

        if (stats) ++stats->ladders;
        StrongSequence seq = pow_mod_strong(a, st.nm1, n);
        if (seq.fermat() != 1) {
            return st.reject(RejectReason::FermatWitness, a, tried);
        }
        if (seq.values[0] == 1) continue;  // strong liar
        std::size_t j = seq.values.size() - 1;
        while (seq.values[j] == 1) --j;
        u128 x = seq.values[j];
        if (x == n - 1) continue;  // strong liar
        bool touched = false;
        if (auto v = apply_splitter(st, x, touched, tried, stats)) return *v;
        if (!touched) {
            // The square root did not separate the remaining cofactors;
            // check whether they are simply prime before burning bases.
            if (auto v = classify_pending(st, tried)) return *v;
        }
    }

    if (!st.pending.empty()) {
        if (!opts.factor_fallback) {
            QueryVerdict v;
            v.kind = QueryVerdict::Kind::Undecided;
            v.bases_tried = tried;
            return v;
        }
        std::vector<u128> work = std::move(st.pending);
        st.pending.clear();
        for (u128 c : work) {
            if (stats) ++stats->fallback_factorizations;
            Factorization f = pollard_factor(c);
            for (const auto& [p, e] : f.factors) {
                if (e > 1) return st.reject(RejectReason::NotSquarefree, p, tried);
                if (auto v = confirm_prime(st, p, tried)) return *v;
            }
        }
    }
    return assemble(st, tried);
}

}  // namespace carmtab
