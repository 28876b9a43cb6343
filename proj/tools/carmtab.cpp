#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "carmtab/query.hpp"
#include "carmtab/tabulate.hpp"

using namespace carmtab;

namespace {

u128 parse_bound_or_throw(const std::string& s, const char* what) {
    auto v = parse_u128(s);
    if (!v) throw CLI::ValidationError(std::string(what) + ": not a decimal integer in range: " + s);
    return *v;
}

u128 default_crossover(u128 B) {
    u128 r = integer_cbrt(B);
    // nearest integer to B^(1/3)
    u128 lo_gap = B - r * r * r;
    u128 hi, hi3;
    if (!mul_overflows(r + 1, (r + 1) * (r + 1), hi3) && hi3 - B < lo_gap) hi = r + 1;
    else hi = r;
    return std::max<u128>(hi, 2);
}

int cmd_tabulate(const std::string& bound_str, const std::string& crossover_str,
                 const std::string& strategy_str, double delta, unsigned workers,
                 const std::string& out_path, unsigned base_budget, bool seeded, u64 seed,
                 u64 sieve_cap) {
    u128 B = parse_bound_or_throw(bound_str, "--bound");
    if (B > pow10_u128(24)) {
        std::cerr << "error: --bound must be <= 10^24\n";
        return 1;
    }
    auto strategy = parse_strategy(strategy_str);
    if (!strategy) {
        std::cerr << "error: unknown strategy '" << strategy_str << "'\n";
        return 1;
    }
    u128 X = crossover_str.empty() ? default_crossover(B) : parse_bound_or_throw(crossover_str, "--crossover");
    if (X < 2 || X > B) {
        std::cerr << "error: need 2 <= crossover <= bound\n";
        return 1;
    }
    TabulateConfig cfg;
    cfg.delta = delta;
    cfg.workers = workers;
    cfg.query.base_budget = base_budget;
    cfg.query.random_bases = seeded;
    cfg.query.seed = seed;
    cfg.sieve.square_cap = sieve_cap;
    cfg.sieve.product_cap = sieve_cap;

    TabulationResult result = run(B, X, *strategy, cfg);
    if (out_path.empty()) {
        write_result(std::cout, result);
    } else {
        std::ofstream os(out_path);
        if (!os) {
            std::cerr << "error: cannot open " << out_path << " for writing\n";
            return 1;
        }
        write_result(os, result);
    }
    std::cerr << "found " << result.records.size() << " Carmichael numbers below "
              << to_string(B) << "\n";
    return 0;
}

int cmd_check(const std::string& n_str, unsigned base_budget, bool seeded, u64 seed) {
    auto n = parse_u128(n_str);
    if (!n) {
        std::cerr << "error: not a decimal integer: " << n_str << "\n";
        return 2;
    }
    if (*n >= is_prime_limit) {
        std::cerr << "error: n out of supported range\n";
        return 2;
    }
    if (*n < 2) {
        std::cout << "not-carmichael too-small\n";
        return 1;
    }
    QueryOptions opts;
    opts.base_budget = base_budget;
    opts.random_bases = seeded;
    opts.seed = seed;
    Preproduct trivial;
    QueryVerdict v = is_carmichael(*n, trivial, 1, opts);
    switch (v.kind) {
        case QueryVerdict::Kind::Carmichael: {
            std::cout << "carmichael";
            for (const auto& [p, e] : v.factorization.factors) {
                (void)e;
                std::cout << ' ' << to_string(p);
            }
            std::cout << "\n";
            return 0;
        }
        case QueryVerdict::Kind::NotCarmichael:
            std::cout << "not-carmichael " << reject_reason_name(v.reason);
            if (v.reason == RejectReason::FermatWitness) std::cout << " base=" << to_string(v.witness);
            else if (v.reason != RejectReason::Prime) std::cout << " witness=" << to_string(v.witness);
            std::cout << "\n";
            return 1;
        case QueryVerdict::Kind::Undecided:
            std::cout << "undecided bases=" << v.bases_tried << "\n";
            return 1;
    }
    return 1;
}

int cmd_jobs(const std::string& bound_str, const std::string& crossover_str,
             const std::string& out_path, const std::string& shard) {
    u128 B = parse_bound_or_throw(bound_str, "--bound");
    u128 X = crossover_str.empty() ? default_crossover(B) : parse_bound_or_throw(crossover_str, "--crossover");
    u64 shard_index = 0, shard_count = 1;
    if (!shard.empty()) {
        auto slash = shard.find('/');
        if (slash == std::string::npos) {
            std::cerr << "error: --shard expects i/m\n";
            return 1;
        }
        auto i = parse_u128(shard.substr(0, slash));
        auto m = parse_u128(shard.substr(slash + 1));
        if (!i || !m || *m == 0 || *i >= *m) {
            std::cerr << "error: --shard expects i/m with 0 <= i < m\n";
            return 1;
        }
        shard_index = static_cast<u64>(*i);
        shard_count = static_cast<u64>(*m);
    }
    std::vector<Preproduct> jobs = generate_jobs(B, X);
    std::vector<Preproduct> picked;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (i % shard_count == shard_index) picked.push_back(std::move(jobs[i]));
    }
    if (out_path.empty()) {
        write_jobs(std::cout, picked);
    } else {
        std::ofstream os(out_path);
        if (!os) {
            std::cerr << "error: cannot open " << out_path << " for writing\n";
            return 1;
        }
        write_jobs(os, picked);
    }
    std::cerr << picked.size() << " jobs\n";
    return 0;
}

int cmd_verify(const std::string& a_path, const std::string& b_path) {
    auto load = [](const std::string& path) -> std::optional<std::vector<CarmichaelRecord>> {
        std::ifstream is(path);
        if (!is) return std::nullopt;
        return read_result(is);
    };
    auto a = load(a_path);
    auto b = load(b_path);
    if (!a || !b) {
        std::cerr << "error: cannot read result files\n";
        return 2;
    }
    auto norm = [](std::vector<CarmichaelRecord>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    norm(*a);
    norm(*b);
    std::size_t i = 0;
    while (i < a->size() && i < b->size()) {
        const auto& ra = (*a)[i];
        const auto& rb = (*b)[i];
        if (ra.n != rb.n || ra.primes != rb.primes) {
            std::cout << "divergence at record " << i << ": " << to_string(ra.n) << " vs "
                      << to_string(rb.n) << "\n";
            return 1;
        }
        ++i;
    }
    if (a->size() != b->size()) {
        const auto& extra = a->size() > b->size() ? (*a)[i] : (*b)[i];
        std::cout << "divergence: only one file has " << to_string(extra.n) << "\n";
        return 1;
    }
    std::cout << "identical: " << a->size() << " records\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Carmichael number tabulation"};
    app.require_subcommand(1);

    std::string bound, crossover, strategy = "hybrid", out, jobs_file, shard, n_str, file_a, file_b;
    double delta = 0.2;
    unsigned workers = 1, base_budget = 64;
    u64 seed = 0, sieve_cap = 10000;

    auto* tab = app.add_subcommand("tabulate", "find all Carmichael numbers below a bound");
    tab->add_option("--bound", bound, "tabulation bound B (decimal, < 10^24)")->required();
    tab->add_option("--crossover", crossover, "crossover X (default: round(B^(1/3)))");
    tab->add_option("--strategy", strategy, "bruteforce|pinch-levels|hybrid|optimal");
    tab->add_option("--delta", delta, "optimal strategy split parameter");
    tab->add_option("--workers", workers, "worker thread count");
    tab->add_option("--out", out, "output file (stdout when absent)");
    tab->add_option("--base-budget", base_budget, "Fermat bases per query before factoring");
    auto* seed_opt = tab->add_option("--seed", seed, "use seeded random Fermat bases");
    tab->add_option("--sieve-cap", sieve_cap, "prime-square / inadmissible-product sieve cap");

    auto* chk = app.add_subcommand("check", "is n a Carmichael number?");
    chk->add_option("n", n_str, "the number to test")->required();
    chk->add_option("--base-budget", base_budget, "Fermat bases before factoring");
    auto* chk_seed_opt = chk->add_option("--seed", seed, "use seeded random Fermat bases");

    auto* jb = app.add_subcommand("jobs", "write the preproduct job file");
    jb->add_option("--bound", bound, "tabulation bound B")->required();
    jb->add_option("--crossover", crossover, "crossover X (default: round(B^(1/3)))");
    jb->add_option("--jobs-file", jobs_file, "output file (stdout when absent)");
    jb->add_option("--shard", shard, "i/m: keep every m-th job starting at i");

    auto* ver = app.add_subcommand("verify", "compare two result files");
    ver->add_option("fileA", file_a)->required();
    ver->add_option("fileB", file_b)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (tab->parsed()) {
            return cmd_tabulate(bound, crossover, strategy, delta, workers, out, base_budget,
                                seed_opt->count() > 0, seed, sieve_cap);
        }
        if (chk->parsed()) {
            return cmd_check(n_str, base_budget, chk_seed_opt->count() > 0, seed);
        }
        if (jb->parsed()) {
            return cmd_jobs(bound, crossover, jobs_file, shard);
        }
        if (ver->parsed()) {
            return cmd_verify(file_a, file_b);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return tab->parsed() || jb->parsed() || ver->parsed() ? 1 : 2;
    }
    return 1;
}
