#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpw {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NonPrimeModulus : Error {
    std::size_t line = 0, col = 0;  // set when raised from a session file
    explicit NonPrimeModulus(std::uint64_t p)
        : Error("modulus " + std::to_string(p) + " is not a prime in [2, 2^31]") {}
    NonPrimeModulus(std::uint64_t p, std::size_t l, std::size_t c)
        : Error("line " + std::to_string(l) + ", col " + std::to_string(c) + ": modulus " +
                std::to_string(p) + " is not a prime in [2, 2^31]"),
          line(l),
          col(c) {}
};

struct ZeroInverse : Error {
    ZeroInverse() : Error("inverse of zero residue") {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

// Residues are plain uint64_t values in [0, p); every container carries its
// modulus through an Fp context rather than per-entry.
using Scalar = std::uint64_t;

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

class Fp {
public:
    explicit Fp(std::uint64_t p) : p_(p) {
        if (p < 2 || p > (std::uint64_t{1} << 31) || !is_prime_u64(p)) throw NonPrimeModulus(p);
    }

    std::uint64_t modulus() const { return p_; }

    Scalar reduce_int(long long v) const {
        long long m = static_cast<long long>(p_);
        long long r = v % m;
        if (r < 0) r += m;
        return static_cast<Scalar>(r);
    }

    Scalar add(Scalar a, Scalar b) const {
        Scalar s = a + b;
        return s >= p_ ? s - p_ : s;
    }

    Scalar sub(Scalar a, Scalar b) const { return a >= b ? a - b : a + p_ - b; }

    Scalar neg(Scalar a) const { return a == 0 ? 0 : p_ - a; }

    // p <= 2^31 keeps a*b below 2^62.
    Scalar mul(Scalar a, Scalar b) const { return (a * b) % p_; }

    Scalar pow(Scalar a, std::uint64_t e) const {
        Scalar r = 1 % p_;
        Scalar b = a % p_;
        while (e) {
            if (e & 1) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }

    Scalar inv(Scalar a) const {
        if (a % p_ == 0) throw ZeroInverse();
        return pow(a, p_ - 2);
    }

    // Frobenius on scalars; over F_p this is the identity, kept explicit so the
    // semilinear laws read the same as in the general case.
    Scalar frob(Scalar a) const { return pow(a, p_); }

    bool operator==(const Fp& o) const { return p_ == o.p_; }

private:
    std::uint64_t p_;
};

inline std::uint64_t digit_sum_base_p(std::uint64_t n, std::uint64_t p) {
    std::uint64_t s = 0;
    while (n) {
        s += n % p;
        n /= p;
    }
    return s;
}

// Legendre: v_p(n!) = (n - s_p(n)) / (p - 1).
inline std::uint64_t factorial_valuation(std::uint64_t n, std::uint64_t p) {
    return (n - digit_sum_base_p(n, p)) / (p - 1);
}

inline Scalar factorial_mod_p(const Fp& k, std::uint64_t n) {
    Scalar r = 1;
    for (std::uint64_t i = 2; i <= n; ++i) r = k.mul(r, i % k.modulus());
    return r;
}

// Unit part of n! mod p via the Wilson block recursion:
//   n! = p^{floor(n/p)} * floor(n/p)! * (prod of units below n),
//   the unit block being (-1)^{floor(n/p)} * (n mod p)! mod p.
inline Scalar factorial_unit_mod_p(const Fp& k, std::uint64_t n) {
    const std::uint64_t p = k.modulus();
    Scalar u = 1;
    while (n) {
        std::uint64_t q = n / p;
        u = k.mul(u, factorial_mod_p(k, n % p));
        if (q & 1) u = k.neg(u);
        n = q;
    }
    return u;
}

// Lucas: C(n, m) mod p is the digitwise product of small binomials.
inline Scalar binom_mod_p(const Fp& k, std::uint64_t n, std::uint64_t m) {
    if (m > n) return 0;
    const std::uint64_t p = k.modulus();
    Scalar r = 1;
    while (n || m) {
        std::uint64_t nd = n % p, md = m % p;
        if (md > nd) return 0;
        if (md > nd - md) md = nd - md;
        Scalar num = 1, den = 1;
        for (std::uint64_t i = 0; i < md; ++i) {
            num = k.mul(num, (nd - i) % p);
            den = k.mul(den, (i + 1) % p);
        }
        r = k.mul(r, k.mul(num, k.inv(den)));
        n /= p;
        m /= p;
    }
    return r;
}

// (pr)! / (p! * (r!)^p) mod p: the coefficient of the p-th divided power of an
// r-th divided power.  Its p-adic valuation is s_p(r) - 1, so it vanishes
// unless r is a power of p.
inline Scalar dp_compose_coeff(const Fp& k, std::uint64_t r) {
    if (r == 0) return 0;
    const std::uint64_t p = k.modulus();
    if (digit_sum_base_p(r, p) != 1) return 0;
    Scalar num = factorial_unit_mod_p(k, p * r);
    Scalar den = k.mul(factorial_unit_mod_p(k, p),
                       k.pow(factorial_unit_mod_p(k, r), p));
    return k.mul(num, k.inv(den));
}

}  // namespace dpw
