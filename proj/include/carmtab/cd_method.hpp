#pragma once

#include <vector>

#include "carmtab/preproduct.hpp"
#include "carmtab/record.hpp"

namespace carmtab {

// Three-prime completions n = P*q*r are parameterized by integers
// 2 <= D < P < C with Delta = C*D - P^2:
//   q = (P-1)(P+D)/Delta + 1,  r = (P-1)(P+C)/Delta + 1,
//   P^2 < C*D < P^2 (p+3)/(p+1)   (p the largest prime of P).
// Per D the candidates come either from the divisors Delta of
// (P-1)(P+D) or from scanning C across its interval.
enum class PqrStrategy { Auto, DivisorPath, CPath };

// All Carmichael n = P*q*r < B with q, r primes > p admissible to P.
// Each n is reported once, ascending.
std::vector<CarmichaelRecord> tabulate_pqr(const Preproduct& pre, u128 B,
                                           PqrStrategy strategy = PqrStrategy::Auto);

// Union of tabulate_pqr over every odd cyclic squarefree P <= X,
// deduplicated and sorted. X is inclusive: the crossover threshold sits
// just above the given integer, consistently with the job partition.
std::vector<CarmichaelRecord> tabulate_small_case(u128 B, u128 X,
                                                  PqrStrategy strategy = PqrStrategy::Auto);

}  // namespace carmtab
