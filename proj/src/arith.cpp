#include "carmtab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace carmtab {

std::string to_string(u128 x) {
    if (x == 0) return "0";
    std::string s;
    while (x > 0) {
        s.push_back(static_cast<char>('0' + static_cast<unsigned>(x % 10)));
        x /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

std::optional<u128> parse_u128(std::string_view s) {
    if (s.empty()) return std::nullopt;
    u128 x = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        if (x > wide_max / 10) return std::nullopt;
        x *= 10;
        u128 d = static_cast<u128>(c - '0');
        if (x > wide_max - d) return std::nullopt;
        x += d;
    }
    return x;
}

u128 pow10_u128(unsigned e) {
    if (e > 38) throw std::overflow_error("pow10_u128: exponent too large");
    u128 x = 1;
    while (e--) x *= 10;
    return x;
}

bool mul_overflows(u128 a, u128 b, u128& out) {
    if (a != 0 && b > wide_max / a) return true;
    out = a * b;
    return false;
}

bool add_overflows(u128 a, u128 b, u128& out) {
    if (b > wide_max - a) return true;
    out = a + b;
    return false;
}

u128 gcd(u128 a, u128 b) {
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

u128 lcm(u128 a, u128 b) {
    if (a == 0 || b == 0) return 0;
    u128 g = gcd(a, b);
    u128 out;
    if (mul_overflows(a / g, b, out)) throw std::overflow_error("lcm overflow");
    return out;
}

std::optional<u128> inv_mod(u128 a, u128 m) {
    if (m == 0) return std::nullopt;
    a %= m;
    if (m == 1) return u128(1);  // residue class 0 mod 1; least positive member is 1
    // Extended Euclid. Coefficients stay below m in magnitude, so i128 holds them.
    i128 old_r = static_cast<i128>(a), r = static_cast<i128>(m);
    i128 old_t = 1, t = 0;
    while (r != 0) {
        i128 q = old_r / r;
        i128 tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_t - q * t;
        old_t = t;
        t = tmp;
    }
    if (old_r != 1) return std::nullopt;
    i128 inv = old_t % static_cast<i128>(m);
    if (inv < 0) inv += static_cast<i128>(m);
    if (inv == 0) inv = static_cast<i128>(m);
    return static_cast<u128>(inv);
}

u128 mul_mod(u128 a, u128 b, u128 m) {
    if (m == 0 || m >= modulus_max) throw std::domain_error("mul_mod: modulus out of supported range");
    a %= m;
    b %= m;
    if (m <= u128(UINT64_MAX)) {
        // a, b < m <= 2^64, so the full product fits in 128 bits.
        return (a * b) % m;
    }
    // 2^64 < m < 2^96: shift-and-add over the bits of b. Residues stay
    // below m < 2^96, so doubling and adding never leave 128 bits.
    if (a < b) std::swap(a, b);
    u128 res = 0;
    int hb = 0;
    for (int i = 95; i >= 0; --i) {
        if ((b >> i) & 1) { hb = i; break; }
    }
    if (b == 0) return 0;
    for (int i = hb; i >= 0; --i) {
        res += res;
        if (res >= m) res -= m;
        if ((b >> i) & 1) {
            res += a;
            if (res >= m) res -= m;
        }
    }
    return res;
}

u128 pow_mod(u128 a, u128 e, u128 m) {
    if (m == 0 || m >= modulus_max) throw std::domain_error("pow_mod: modulus out of supported range");
    a %= m;
    u128 res = 1 % m;
    while (e > 0) {
        if (e & 1) res = mul_mod(res, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return res;
}

StrongSequence pow_mod_strong(u128 a, u128 e, u128 m) {
    if (m == 0 || m >= modulus_max) throw std::domain_error("pow_mod_strong: modulus out of supported range");
    StrongSequence seq;
    if (e == 0) {
        seq.values.push_back(1 % m);
        return seq;
    }
    unsigned s = 0;
    u128 odd = e;
    while ((odd & 1) == 0) {
        odd >>= 1;
        ++s;
    }
    seq.odd = odd;
    seq.two_exp = s;
    seq.values.reserve(s + 1);
    u128 x = pow_mod(a, odd, m);
    seq.values.push_back(x);
    for (unsigned i = 0; i < s; ++i) {
        x = mul_mod(x, x, m);
        seq.values.push_back(x);
    }
    return seq;
}

namespace {

// v^n <= x, computed without overflow (overflow means v^n > x trivially).
bool pow_le(u128 v, unsigned n, u128 x) {
    u128 acc = 1;
    for (unsigned i = 0; i < n; ++i) {
        if (mul_overflows(acc, v, acc)) return false;
    }
    return acc <= x;
}

}  // namespace

u128 integer_nth_root(u128 x, unsigned n) {
    if (n != 2 && n != 3) throw std::invalid_argument("integer_nth_root: n must be 2 or 3");
    if (x == 0) return 0;
    long double guess = powl(static_cast<long double>(x), 1.0L / static_cast<long double>(n));
    u128 r = guess < 1.0L ? u128(1) : static_cast<u128>(guess);
    r += 2;  // start above, then certify downward and upward
    while (r > 0 && !pow_le(r, n, x)) --r;
    while (pow_le(r + 1, n, x)) ++r;
    return r;
}

bool Factorization::squarefree() const {
    for (const auto& [p, e] : factors) {
        (void)p;
        if (e != 1) return false;
    }
    return true;
}

bool Factorization::consistent() const {
    u128 acc = 1;
    u128 prev = 0;
    for (const auto& [p, e] : factors) {
        if (p <= prev) return false;
        prev = p;
        for (unsigned i = 0; i < e; ++i) {
            if (mul_overflows(acc, p, acc)) return false;
        }
    }
    return acc == value;
}

u128 carmichael_lambda(const Factorization& f) {
    u128 lam = 1;
    for (const auto& [p, e] : f.factors) {
        u128 part;
        if (p == 2) {
            if (e == 1) part = 1;
            else if (e == 2) part = 2;
            else part = u128(1) << (e - 2);
        } else {
            part = p - 1;
            for (unsigned i = 1; i < e; ++i) {
                if (mul_overflows(part, p, part)) throw std::overflow_error("carmichael_lambda overflow");
            }
        }
        lam = lcm(lam, part);
    }
    return lam;
}

bool korselt_check(const Factorization& f) {
    if (f.value < 3) return false;
    if (!f.squarefree()) return false;
    if (f.omega() < 2) return false;  // primes are not Carmichael
    u128 nm1 = f.value - 1;
    for (const auto& [p, e] : f.factors) {
        (void)e;
        if (nm1 % (p - 1) != 0) return false;
    }
    return true;
}

}  // namespace carmtab
