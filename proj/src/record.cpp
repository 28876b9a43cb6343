#include "carmtab/record.hpp"

#include <stdexcept>

namespace carmtab {

CarmichaelRecord make_record(const Factorization& f) {
    if (!f.consistent()) throw std::logic_error("make_record: inconsistent factorization");
    if (f.omega() < 3) throw std::logic_error("make_record: Carmichael numbers have at least 3 prime factors");
    if (!korselt_check(f)) throw std::logic_error("make_record: Korselt check failed");
    CarmichaelRecord rec;
    rec.n = f.value;
    rec.primes.reserve(f.factors.size());
    for (const auto& [p, e] : f.factors) {
        (void)e;
        rec.primes.push_back(static_cast<u64>(p));
    }
    return rec;
}

}  // namespace carmtab
