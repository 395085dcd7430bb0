#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dpw/fp.hpp"
#include "dpw/rng.hpp"

namespace dpw {

struct NonzeroConstantTerm : Error {
    NonzeroConstantTerm() : Error("element has a nonzero constant term") {}
};

struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& w) : Error("sparse element grew past its budget: " + w) {}
};

// Bounds for randomly generated sparse elements; the hard guards inside the
// arithmetic are far above these and only stop runaway growth.
struct DPLimits {
    std::uint64_t max_degree = 12;
    std::size_t max_terms = 64;
};

using DPMonomial = std::vector<std::uint32_t>;  // exponent vector, fixed length n

inline std::uint64_t dp_degree(const DPMonomial& m) {
    std::uint64_t d = 0;
    for (std::uint32_t e : m) d += e;
    return d;
}

// Sparse exact element of the free divided-powers algebra on n variables:
// basis monomials x^{(a)} = x_1^{(a_1)} ... x_n^{(a_n)}, unbounded exponents.
struct DPPoly {
    Fp k;
    std::size_t n = 0;
    std::map<DPMonomial, Scalar> terms;  // no zero coefficients stored

    static constexpr std::uint64_t degree_guard = 1u << 12;
    static constexpr std::size_t term_guard = 1u << 16;

    DPPoly(Fp field, std::size_t vars) : k(field), n(vars) {}

    static DPPoly zero(const Fp& k, std::size_t n) { return DPPoly(k, n); }

    static DPPoly monomial(const Fp& k, std::size_t n, DPMonomial m, Scalar c) {
        DPPoly u(k, n);
        u.insert_term(std::move(m), k.reduce_int(static_cast<std::int64_t>(c)));
        return u;
    }

    static DPPoly unit(const Fp& k, std::size_t n) { return monomial(k, n, DPMonomial(n, 0), 1); }

    // x_i^{(r)}
    static DPPoly gamma_var(const Fp& k, std::size_t n, std::size_t i, std::uint32_t r) {
        DPMonomial m(n, 0);
        m.at(i) = r;
        return monomial(k, n, std::move(m), 1);
    }

    bool is_zero() const { return terms.empty(); }

    std::uint64_t degree() const {
        std::uint64_t d = 0;
        for (const auto& [m, c] : terms) d = std::max(d, dp_degree(m));
        return d;
    }

    bool has_constant_term() const { return terms.count(DPMonomial(n, 0)) != 0; }

    void insert_term(DPMonomial m, Scalar c) {
        if (m.size() != n) throw DimensionMismatch("DPPoly::insert_term");
        if (!c) return;
        if (dp_degree(m) > degree_guard) throw BudgetExceeded("degree " + std::to_string(dp_degree(m)));
        auto it = terms.find(m);
        if (it == terms.end()) {
            if (terms.size() >= term_guard) throw BudgetExceeded("term count");
            terms.emplace(std::move(m), c);
        } else {
            it->second = k.add(it->second, c);
            if (!it->second) terms.erase(it);
        }
    }

    std::string to_string() const {
        if (terms.empty()) return "0";
        std::string s;
        for (const auto& [m, c] : terms) {
            if (!s.empty()) s += " + ";
            std::string mono;
            for (std::size_t i = 0; i < n; ++i) {
                if (!m[i]) continue;
                if (!mono.empty()) mono += "*";
                mono += "x" + std::to_string(i + 1);
                if (m[i] > 1) mono += "^(" + std::to_string(m[i]) + ")";
            }
            if (mono.empty())
                s += std::to_string(c);
            else if (c == 1)
                s += mono;
            else
                s += std::to_string(c) + "*" + mono;
        }
        return s;
    }

    bool operator==(const DPPoly& o) const { return k.modulus() == o.k.modulus() && n == o.n && terms == o.terms; }
};

inline void dp_require_compatible(const DPPoly& u, const DPPoly& v) {
    if (u.k.modulus() != v.k.modulus() || u.n != v.n) throw DimensionMismatch("divided-power operands");
}

inline DPPoly dp_add(const DPPoly& u, const DPPoly& v) {
    dp_require_compatible(u, v);
    DPPoly r = u;
    for (const auto& [m, c] : v.terms) r.insert_term(m, c);
    return r;
}

inline DPPoly dp_scale(const DPPoly& u, Scalar c) {
    DPPoly r(u.k, u.n);
    Scalar cc = c % u.k.modulus();
    for (const auto& [m, coef] : u.terms) r.insert_term(m, u.k.mul(coef, cc));
    return r;
}

inline DPPoly dp_sub(const DPPoly& u, const DPPoly& v) { return dp_add(u, dp_scale(v, v.k.modulus() - 1)); }

// x^{(a)} x^{(b)} = prod_i C(a_i + b_i, a_i) x^{(a+b)}, exactly, per variable.
inline DPPoly dp_multiply(const DPPoly& u, const DPPoly& v) {
    dp_require_compatible(u, v);
    DPPoly r(u.k, u.n);
    for (const auto& [a, ca] : u.terms)
        for (const auto& [b, cb] : v.terms) {
            Scalar c = u.k.mul(ca, cb);
            DPMonomial m(u.n);
            for (std::size_t i = 0; i < u.n && c; ++i) {
                m[i] = a[i] + b[i];
                c = u.k.mul(c, binom_mod_p(u.k, a[i] + b[i], a[i]));
            }
            if (c) r.insert_term(std::move(m), c);
        }
    return r;
}

inline DPPoly dp_power(const DPPoly& u, std::uint64_t e) {
    DPPoly r = DPPoly::unit(u.k, u.n);
    for (std::uint64_t s = 0; s < e; ++s) r = dp_multiply(r, u);
    return r;
}

// Lowers the i-th exponent of every monomial; the divided-power partial.
inline DPPoly dp_d(const DPPoly& u, std::size_t i) {
    if (i >= u.n) throw DimensionMismatch("dp_d variable index");
    DPPoly r(u.k, u.n);
    for (const auto& [m, c] : u.terms) {
        if (!m[i]) continue;
        DPMonomial low = m;
        --low[i];
        r.insert_term(std::move(low), c);
    }
    return r;
}

inline DPPoly dp_correction(const DPPoly& u, const DPPoly& v) {
    const Fp& k = u.k;
    const std::uint64_t p = k.modulus();
    DPPoly acc(k, u.n);
    DPPoly upow = u;
    std::vector<DPPoly> vpows;
    vpows.reserve(p);
    vpows.push_back(v);
    for (std::uint64_t e = 2; e <= p - 1; ++e) vpows.push_back(dp_multiply(vpows.back(), v));
    Scalar sign = k.neg(1);
    for (std::uint64_t kk = 1; kk <= p - 1; ++kk) {
        Scalar coeff = k.mul(sign, k.inv(kk % p));
        acc = dp_add(acc, dp_scale(dp_multiply(upow, vpows[p - kk - 1]), coeff));
        if (kk + 1 <= p - 1) upow = dp_multiply(upow, u);
        sign = k.neg(sign);
    }
    return acc;
}

// The p-map on O(n)_+: seeds pi(c x_i^{(r)}) = c * dp_coeff(p, r) x_i^{(pr)},
// zero on mixed monomials, folded over the terms with the sum-rule
// correction.  Exact: exponents grow p-fold, nothing is truncated.
inline DPPoly dp_pmap(const DPPoly& u) {
    const Fp& k = u.k;
    const std::uint64_t p = k.modulus();
    if (u.has_constant_term()) throw NonzeroConstantTerm();

    auto seed = [&](const DPMonomial& m, Scalar c) {
        std::size_t nz = 0, var = 0;
        for (std::size_t i = 0; i < u.n; ++i)
            if (m[i]) {
                ++nz;
                var = i;
            }
        DPPoly out(k, u.n);
        if (nz != 1) return out;  // mixed monomials are products inside the ideal
        Scalar coeff = k.mul(c, dp_compose_coeff(k, m[var]));  // c^p = c
        if (!coeff) return out;
        DPMonomial img(u.n, 0);
        img[var] = static_cast<std::uint32_t>(p * m[var]);
        out.insert_term(std::move(img), coeff);
        return out;
    };

    DPPoly partial(k, u.n);  // sum of the terms folded so far
    DPPoly acc(k, u.n);
    for (const auto& [m, c] : u.terms) {
        DPPoly term = DPPoly::monomial(k, u.n, m, c);
        if (!partial.is_zero()) acc = dp_add(acc, dp_correction(partial, term));
        acc = dp_add(acc, seed(m, c));
        partial = dp_add(partial, term);
    }
    return acc;
}

// gamma_n via base-p digits: gamma_n(x) = (prod n_i!)^{-1} prod pi^{(i)}(x)^{n_i}.
inline DPPoly dp_gamma(const DPPoly& x, std::uint64_t nn) {
    const Fp& k = x.k;
    const std::uint64_t p = k.modulus();
    if (x.has_constant_term()) throw NonzeroConstantTerm();
    if (nn == 0) return DPPoly::unit(k, x.n);
    DPPoly gamma = DPPoly::unit(k, x.n);
    Scalar fact = 1;
    DPPoly iter = x;
    for (std::uint64_t rest = nn; rest; rest /= p) {
        std::uint64_t digit = rest % p;
        if (digit) {
            gamma = dp_multiply(gamma, dp_power(iter, digit));
            fact = k.mul(fact, factorial_mod_p(k, digit));
        }
        if (rest / p) iter = dp_pmap(iter);
    }
    return dp_scale(gamma, k.inv(fact));
}

// D = sum_i f_i d_i.
struct SpecialVectorField {
    std::vector<DPPoly> components;  // size n, each over the same (p, n)

    const Fp& field() const { return components.at(0).k; }
    std::size_t vars() const { return components.size(); }

    DPPoly apply(const DPPoly& u) const {
        DPPoly r(u.k, u.n);
        if (u.n != components.size()) throw DimensionMismatch("SpecialVectorField::apply");
        for (std::size_t i = 0; i < components.size(); ++i)
            r = dp_add(r, dp_multiply(components[i], dp_d(u, i)));
        return r;
    }
};

inline SpecialVectorField dp_basis_field(const Fp& k, std::size_t n, std::size_t i) {
    std::vector<DPPoly> comps;
    for (std::size_t j = 0; j < n; ++j)
        comps.push_back(j == i ? DPPoly::unit(k, n) : DPPoly::zero(k, n));
    return SpecialVectorField{std::move(comps)};
}

struct BeckIdentityCheck {
    bool ok = true;
    std::string witness;  // printed difference when the identity fails
};

// D(pi(a)) = gamma_{p-1}(a) D(a), evaluated exactly on the sparse model.
// The generic form takes any linear self-map, so a redefined (non-special)
// action can be probed and fail honestly.
template <typename ApplyFn>
BeckIdentityCheck check_beck_identity_with(const ApplyFn& apply, const DPPoly& a) {
    if (a.has_constant_term()) throw NonzeroConstantTerm();
    DPPoly lhs = apply(dp_pmap(a));
    DPPoly rhs = dp_multiply(dp_gamma(a, a.k.modulus() - 1), apply(a));
    if (lhs == rhs) return {};
    return {false, "D(pi(a)) - gamma_{p-1}(a)D(a) = " + dp_sub(lhs, rhs).to_string() + " at a = " + a.to_string()};
}

inline BeckIdentityCheck check_beck_identity(const SpecialVectorField& D, const DPPoly& a) {
    return check_beck_identity_with([&](const DPPoly& u) { return D.apply(u); }, a);
}

// [sum f_i d_i, sum g_j d_j] = sum_j ( sum_i f_i d_i(g_j) - g_i d_i(f_j) ) d_j
inline SpecialVectorField witt_bracket(const SpecialVectorField& D1, const SpecialVectorField& D2) {
    if (D1.vars() != D2.vars()) throw DimensionMismatch("witt_bracket");
    const std::size_t n = D1.vars();
    std::vector<DPPoly> comps;
    comps.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        DPPoly c = DPPoly::zero(D1.field(), n);
        for (std::size_t i = 0; i < n; ++i) {
            c = dp_add(c, dp_multiply(D1.components[i], dp_d(D2.components[j], i)));
            c = dp_sub(c, dp_multiply(D2.components[i], dp_d(D1.components[j], i)));
        }
        comps.push_back(std::move(c));
    }
    return SpecialVectorField{std::move(comps)};
}

// Random sparse element within the stated budgets; plus_only skips the
// constant monomial.
inline DPPoly random_dp_poly(const Fp& k, std::size_t n, Rng& rng, bool plus_only, const DPLimits& lim = {},
                             std::size_t max_terms_hint = 3) {
    DPPoly u(k, n);
    std::size_t nterms = 1 + rng.below(max_terms_hint);
    for (std::size_t t = 0; t < nterms && u.terms.size() < lim.max_terms; ++t) {
        DPMonomial m(n, 0);
        std::uint64_t budget = lim.max_degree;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t e = static_cast<std::uint32_t>(rng.below(std::min<std::uint64_t>(budget + 1, 5)));
            m[i] = e;
            budget -= e;
        }
        if (plus_only && dp_degree(m) == 0) continue;
        u.insert_term(std::move(m), 1 + rng.below(k.modulus() - 1));
    }
    return u;
}

inline SpecialVectorField random_special_field(const Fp& k, std::size_t n, Rng& rng, const DPLimits& lim = {}) {
    std::vector<DPPoly> comps;
    comps.reserve(n);
    for (std::size_t i = 0; i < n; ++i) comps.push_back(random_dp_poly(k, n, rng, false, lim, 2));
    return SpecialVectorField{std::move(comps)};
}

}  // namespace dpw
