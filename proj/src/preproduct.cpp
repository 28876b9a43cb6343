#include "carmtab/preproduct.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace carmtab {

bool Preproduct::valid() const {
    u128 prod = 1;
    u128 lam = 1;
    u64 prev = 0;
    for (u64 q : primes) {
        if (q <= prev || !is_prime(q)) return false;
        // pairwise admissibility against the earlier primes
        if (gcd(u128(q) - 1, prod) != 1) return false;
        if (mul_overflows(prod, q, prod)) return false;
        lam = lcm(lam, u128(q) - 1);
        prev = q;
    }
    if (prod != P || lam != lambda) return false;
    if ((primes.empty() ? 1 : primes.back()) != p) return false;
    if (gcd(P, lambda) != 1) return false;
    if (b < p) return false;
    return true;
}

bool is_admissible(u64 q, const Preproduct& pre) {
    if (pre.P % q == 0) return false;
    return gcd(u128(q) - 1, pre.P) == 1;
}

u128 r_star(const Preproduct& pre) {
    if (pre.P == 1) return 1;
    auto inv = inv_mod(pre.P, pre.lambda);
    if (!inv) throw std::domain_error("r_star: P not invertible mod lambda(P)");
    return *inv;
}

Preproduct extend(const Preproduct& pre, u64 q) {
    if (u128(q) <= pre.b) throw std::invalid_argument("extend: q must exceed the append bound");
    if (!is_admissible(q, pre)) throw std::invalid_argument("extend: q inadmissible");
    Preproduct out;
    if (mul_overflows(pre.P, q, out.P)) throw std::overflow_error("extend: P*q overflow");
    out.lambda = lcm(pre.lambda, u128(q) - 1);
    out.primes = pre.primes;
    out.primes.push_back(q);
    out.p = q;
    out.b = q;
    return out;
}

Preproduct single_prime_preproduct(u64 p, u128 b) {
    Preproduct out;
    out.P = p;
    out.lambda = u128(p) - 1;
    out.primes = {p};
    out.p = p;
    out.b = b;
    return out;
}

namespace {

void jobs_dfs(const Preproduct& pre, u128 B, u128 X, const PrimeTable& table,
              std::vector<Preproduct>& out) {
    for (std::size_t i = table.first_above(pre.p); i < table.primes.size(); ++i) {
        u64 q = table.primes[i];
        if (q == 2) continue;
        u128 next;
        if (mul_overflows(pre.P, q, next) || next > X) break;
        if (!is_admissible(q, pre)) continue;
        Preproduct child = extend(pre, q);
        // P*p^3 < B leaves room for three appended primes. The bound is
        // monotone in q and along any extension, so the first failure
        // kills this level and everything below it.
        u128 pcube, bound;
        bool room = !mul_overflows(u128(q), u128(q) * q, pcube) &&
                    !mul_overflows(child.P, pcube, bound) && bound < B;
        if (!room) break;
        Preproduct job = child;
        job.b = std::max<u128>(X / job.P, job.p);
        out.push_back(std::move(job));
        jobs_dfs(child, B, X, table, out);
    }
}

}  // namespace

std::vector<Preproduct> generate_jobs(u128 B, u128 X) {
    if (X < 2 || X > B) throw std::invalid_argument("generate_jobs: need 2 <= X <= B");
    std::vector<Preproduct> out;
    Preproduct trivial;
    trivial.b = X;
    out.push_back(trivial);
    // Any job prime p satisfies p^4 <= P*p^3 < B, so the table only needs
    // primes up to min(X, B^(1/4)).
    u64 table_limit = static_cast<u64>(integer_sqrt(integer_sqrt(B)));
    if (X < table_limit) table_limit = static_cast<u64>(X);
    if (table_limit >= 3) {
        PrimeTable table = sieve_primes(table_limit);
        Preproduct one;
        jobs_dfs(one, B, X, table, out);
    }
    std::sort(out.begin(), out.end(), [](const Preproduct& a, const Preproduct& b) { return a.P < b.P; });
    return out;
}

void write_jobs(std::ostream& os, const std::vector<Preproduct>& jobs) {
    for (const Preproduct& j : jobs) {
        os << to_string(j.P) << ' ' << to_string(j.lambda) << ' ' << to_string(j.b) << '\n';
    }
}

std::vector<Preproduct> read_jobs(std::istream& is) {
    std::vector<Preproduct> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string sp, slam, sb;
        if (!(ls >> sp >> slam >> sb)) throw std::runtime_error("read_jobs: malformed line: " + line);
        auto P = parse_u128(sp), lam = parse_u128(slam), b = parse_u128(sb);
        if (!P || !lam || !b) throw std::runtime_error("read_jobs: bad number in line: " + line);
        Preproduct pre;
        pre.P = *P;
        pre.lambda = *lam;
        pre.b = *b;
        if (*P > 1) {
            Factorization f = pollard_factor(*P);
            for (const auto& [prime, e] : f.factors) {
                if (e != 1) throw std::runtime_error("read_jobs: P not squarefree: " + line);
                pre.primes.push_back(static_cast<u64>(prime));
            }
            pre.p = pre.primes.back();
        }
        if (!pre.valid()) throw std::runtime_error("read_jobs: invalid job: " + line);
        out.push_back(std::move(pre));
    }
    return out;
}

}  // namespace carmtab
