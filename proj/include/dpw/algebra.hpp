#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpw/fp.hpp"
#include "dpw/linalg.hpp"
#include "dpw/report.hpp"
#include "dpw/rng.hpp"

namespace dpw {

struct NotInPlusPart : Error {
    NotInPlusPart() : Error("element lies outside the augmentation part") {}
};

struct InvalidShift : Error {
    explicit InvalidShift(const std::string& w) : Error("shift map does not vanish on A_+^2: " + w) {}
};

struct NotAPIdeal : Error {
    explicit NotAPIdeal(const std::string& w) : Error("subspace is not a p-ideal: " + w) {}
};

struct DimensionCapExceeded : Error {
    explicit DimensionCapExceeded(std::size_t dim, std::size_t cap)
        : Error("requested dimension " + std::to_string(dim) + " exceeds cap " + std::to_string(cap)) {}
};

struct Term {
    std::uint32_t idx;
    Scalar c;
    bool operator==(const Term&) const = default;
};

using SparseRow = std::vector<Term>;  // sorted by idx, coefficients nonzero

// Finite-dimensional commutative unital algebra over F_p with a distinguished
// ideal complement: basis index 0 is the unit, plus_indices span the ideal
// A_+, the remaining indices span the subspace A_0 of scalars-like elements.
// Multiplication is a symmetric table of sparse rows.
struct FiniteCommAlgebra {
    Fp k;
    std::size_t dim = 0;
    std::vector<std::string> labels;
    std::vector<SparseRow> table;           // dim*dim rows, row(i,j) = e_i e_j
    std::vector<std::uint32_t> plus;        // sorted, never contains 0
    std::vector<bool> is_plus;              // size dim
    std::vector<int> plus_pos;              // index -> position in plus, else -1

    FiniteCommAlgebra(Fp field, std::vector<std::string> basis_labels, std::vector<std::uint32_t> plus_set)
        : k(field), dim(basis_labels.size()), labels(std::move(basis_labels)), table(dim * dim), plus(std::move(plus_set)) {
        std::sort(plus.begin(), plus.end());
        plus.erase(std::unique(plus.begin(), plus.end()), plus.end());
        is_plus.assign(dim, false);
        plus_pos.assign(dim, -1);
        for (std::size_t t = 0; t < plus.size(); ++t) {
            std::uint32_t i = plus[t];
            if (i == 0 || i >= dim) throw Error("plus index out of range");
            is_plus[i] = true;
            plus_pos[i] = static_cast<int>(t);
        }
        // unit products are fixed
        for (std::size_t j = 0; j < dim; ++j) {
            table[j] = {Term{static_cast<std::uint32_t>(j), 1}};
            table[j * dim] = {Term{static_cast<std::uint32_t>(j), 1}};
        }
    }

    const SparseRow& row(std::size_t i, std::size_t j) const { return table[i * dim + j]; }

    void set_product(std::size_t i, std::size_t j, SparseRow r) {
        std::sort(r.begin(), r.end(), [](const Term& a, const Term& b) { return a.idx < b.idx; });
        r.erase(std::remove_if(r.begin(), r.end(), [](const Term& t) { return t.c == 0; }), r.end());
        table[i * dim + j] = r;
        table[j * dim + i] = std::move(r);
    }

    void set_product_dense(std::size_t i, std::size_t j, const Vec& v) {
        SparseRow r;
        for (std::size_t m = 0; m < v.size(); ++m)
            if (v[m]) r.push_back(Term{static_cast<std::uint32_t>(m), v[m]});
        set_product(i, j, std::move(r));
    }

    Vec zero() const { return Vec(dim, 0); }

    Vec unit() const {
        Vec v(dim, 0);
        if (dim) v[0] = 1;
        return v;
    }

    Vec basis_vec(std::size_t i) const {
        Vec v(dim, 0);
        v[i] = 1;
        return v;
    }

    std::size_t zero_part_dim() const { return dim - plus.size() ; }

    std::vector<std::uint32_t> zero_part_indices() const {
        std::vector<std::uint32_t> z;
        for (std::size_t i = 0; i < dim; ++i)
            if (!is_plus[i]) z.push_back(static_cast<std::uint32_t>(i));
        return z;
    }

    bool in_plus_span(const Vec& v) const {
        for (std::size_t i = 0; i < dim; ++i)
            if (v[i] && !is_plus[i]) return false;
        return true;
    }

    Vec multiply(const Vec& u, const Vec& v) const {
        if (u.size() != dim || v.size() != dim) throw DimensionMismatch("algebra multiply");
        Vec out(dim, 0);
        for (std::size_t i = 0; i < dim; ++i) {
            if (!u[i]) continue;
            for (std::size_t j = 0; j < dim; ++j) {
                if (!v[j]) continue;
                Scalar c = k.mul(u[i], v[j]);
                for (const Term& t : table[i * dim + j]) out[t.idx] = k.add(out[t.idx], k.mul(c, t.c));
            }
        }
        return out;
    }

    Vec power(const Vec& u, std::uint64_t e) const {
        Vec r = unit();
        Vec b = u;
        while (e) {
            if (e & 1) r = multiply(r, b);
            if (e >>= 1) b = multiply(b, b);
        }
        return r;
    }

    Matrix multiplication_operator(const Vec& f) const {
        Matrix m(k, dim, dim);
        for (std::size_t i = 0; i < dim; ++i) {
            if (!f[i]) continue;
            for (std::size_t j = 0; j < dim; ++j)
                for (const Term& t : table[i * dim + j]) m.at(t.idx, j) = k.add(m.at(t.idx, j), k.mul(f[i], t.c));
        }
        return m;
    }

    std::string to_string(const Vec& v) const {
        std::string s;
        for (std::size_t i = 0; i < dim; ++i) {
            if (!v[i]) continue;
            if (!s.empty()) s += " + ";
            if (i == 0) {
                s += std::to_string(v[i]);
            } else if (v[i] == 1) {
                s += labels[i];
            } else {
                s += std::to_string(v[i]) + "*" + labels[i];
            }
        }
        return s.empty() ? "0" : s;
    }
};

// The p-th divided power recorded on the ideal basis; everything else is
// forced by semilinearity and the sum rule, see eval_pmap.
struct PMap {
    std::vector<Vec> images;  // aligned with FiniteCommAlgebra::plus

    static PMap zero(const FiniteCommAlgebra& A) {
        PMap pi;
        pi.images.assign(A.plus.size(), A.zero());
        return pi;
    }
};

// Sum-rule correction: sum_{k=1}^{p-1} ((-1)^k / k) x^k y^{p-k}.
inline Vec pmap_correction(const FiniteCommAlgebra& A, const Vec& x, const Vec& y) {
    const Fp& k = A.k;
    const std::uint64_t p = k.modulus();
    Vec acc = A.zero();
    Vec xpow = x;                       // x^k
    std::vector<Vec> ypows(p, A.zero());
    ypows[1] = y;
    for (std::uint64_t e = 2; e <= p - 1; ++e) ypows[e] = A.multiply(ypows[e - 1], y);
    Scalar sign = k.neg(1);
    for (std::uint64_t kk = 1; kk <= p - 1; ++kk) {
        Scalar coeff = k.mul(sign, k.inv(kk % p));
        Vec term = A.multiply(xpow, ypows[p - kk]);
        vec_add_scaled(k, acc, term, coeff);
        if (kk + 1 <= p - 1) {
            xpow = A.multiply(xpow, x);
            sign = k.neg(sign);
        }
    }
    return acc;
}

// Canonical evaluation of the p-map on an arbitrary element of A_+: split
// into basis terms in index order, seed single terms semilinearly, fold
// pairwise with the sum rule.  Decomposition independence is a verified
// property, not an assumption.
inline Vec eval_pmap(const FiniteCommAlgebra& A, const PMap& pi, const Vec& u) {
    if (u.size() != A.dim) throw DimensionMismatch("eval_pmap");
    if (!A.in_plus_span(u)) throw NotInPlusPart();
    const Fp& k = A.k;
    Vec acc = A.zero();
    Vec partial = A.zero();
    bool first = true;
    for (std::size_t t = 0; t < A.plus.size(); ++t) {
        const std::uint32_t i = A.plus[t];
        const Scalar lam = u[i];
        if (!lam) continue;
        Vec term(A.dim, 0);
        term[i] = lam;
        Vec pterm = vec_scale(k, pi.images[t], k.frob(lam));
        if (first) {
            acc = std::move(pterm);
            first = false;
        } else {
            Vec corr = pmap_correction(A, partial, term);
            acc = vec_add(k, acc, vec_add(k, pterm, corr));
        }
        partial = vec_add(k, partial, term);
    }
    return acc;
}

struct VerifyOptions {
    std::uint64_t cap = 10000;    // max enumerated check points per axiom
    std::uint64_t budget = 1000;  // sample count past the cap
    std::uint64_t seed = 0;
};

inline std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (r > cap / base) return std::nullopt;
        r *= base;
    }
    return r;
}

// Odometer over all F_p combinations of the given basis indices.
template <typename F>
void enumerate_span(const FiniteCommAlgebra& A, const std::vector<std::uint32_t>& idx, F&& f) {
    const std::uint64_t p = A.k.modulus();
    Vec v(A.dim, 0);
    while (true) {
        f(static_cast<const Vec&>(v));
        std::size_t t = 0;
        for (; t < idx.size(); ++t) {
            if (++v[idx[t]] < p) break;
            v[idx[t]] = 0;
        }
        if (t == idx.size()) return;
    }
}

inline Vec random_span_element(const FiniteCommAlgebra& A, const std::vector<std::uint32_t>& idx, Rng& rng) {
    Vec v(A.dim, 0);
    for (std::uint32_t i : idx) v[i] = rng.below(A.k.modulus());
    return v;
}

inline Vec random_plus_element(const FiniteCommAlgebra& A, Rng& rng) {
    return random_span_element(A, A.plus, rng);
}

inline Report verify_algebra_axioms(const FiniteCommAlgebra& A, const VerifyOptions& opts = {}) {
    (void)opts;
    Report rep;
    rep.prime = A.k.modulus();

    bool unit_ok = true;
    std::optional<std::string> unit_wit;
    for (std::size_t j = 0; j < A.dim && unit_ok; ++j) {
        SparseRow want{Term{static_cast<std::uint32_t>(j), 1}};
        if (!(A.row(0, j) == want) || !(A.row(j, 0) == want)) {
            unit_ok = false;
            unit_wit = "basis index " + std::to_string(j);
        }
    }
    rep.add("algebra-unit", unit_ok).witness = unit_wit;

    bool comm_ok = true;
    std::optional<std::string> comm_wit;
    for (std::size_t i = 0; i < A.dim && comm_ok; ++i)
        for (std::size_t j = i + 1; j < A.dim; ++j)
            if (!(A.row(i, j) == A.row(j, i))) {
                comm_ok = false;
                comm_wit = "(" + A.labels[i] + ", " + A.labels[j] + ")";
                break;
            }
    rep.add("algebra-commutative", comm_ok).witness = comm_wit;

    bool assoc_ok = true;
    std::optional<std::string> assoc_wit;
    for (std::size_t i = 0; i < A.dim && assoc_ok; ++i)
        for (std::size_t j = 0; j < A.dim && assoc_ok; ++j)
            for (std::size_t l = 0; l < A.dim; ++l) {
                Vec left = A.zero(), right = A.zero();
                for (const Term& t : A.row(i, j))
                    for (const Term& s : A.row(t.idx, l)) left[s.idx] = A.k.add(left[s.idx], A.k.mul(t.c, s.c));
                for (const Term& t : A.row(j, l))
                    for (const Term& s : A.row(i, t.idx)) right[s.idx] = A.k.add(right[s.idx], A.k.mul(t.c, s.c));
                if (left != right) {
                    assoc_ok = false;
                    assoc_wit = "(" + A.labels[i] + ", " + A.labels[j] + ", " + A.labels[l] + ")";
                    break;
                }
            }
    rep.add("algebra-associative", assoc_ok).witness = assoc_wit;

    bool ideal_ok = true;
    std::optional<std::string> ideal_wit;
    for (std::uint32_t i : A.plus) {
        for (std::size_t j = 0; j < A.dim && ideal_ok; ++j)
            for (const Term& t : A.row(i, j))
                if (!A.is_plus[t.idx]) {
                    ideal_ok = false;
                    ideal_wit = "(" + A.labels[i] + ", " + A.labels[j] + ")";
                    break;
                }
        if (!ideal_ok) break;
    }
    rep.add("algebra-plus-ideal", ideal_ok).witness = ideal_wit;

    bool zero_ok = true;
    std::optional<std::string> zero_wit;
    for (std::size_t i = 0; i < A.dim && zero_ok; ++i) {
        if (A.is_plus[i]) continue;
        for (std::size_t j = i; j < A.dim && zero_ok; ++j) {
            if (A.is_plus[j]) continue;
            for (const Term& t : A.row(i, j))
                if (A.is_plus[t.idx]) {
                    zero_ok = false;
                    zero_wit = "(" + A.labels[i] + ", " + A.labels[j] + ")";
                    break;
                }
        }
    }
    rep.add("algebra-zero-part-closed", zero_ok).witness = zero_wit;

    rep.checks.front().dims = {static_cast<std::int64_t>(A.dim)};
    return rep;
}

namespace detail {

// Runs fn over every pair from lhs x rhs when the pair count fits the cap,
// otherwise over `budget` seeded samples; fn returns an optional witness.
template <typename SampleL, typename SampleR, typename Check>
inline void pairwise_check(const VerifyOptions& opts, std::uint64_t lhs_count, std::uint64_t rhs_count,
                           const std::function<void(const std::function<void(const Vec&, const Vec&)>&)>& enumerate_pairs,
                           SampleL&& sample_l, SampleR&& sample_r, Check&& fn, CheckResult& out,
                           std::uint64_t seed_salt) {
    bool exhaustive = lhs_count != 0 && rhs_count != 0 && lhs_count <= opts.cap / rhs_count;
    std::optional<std::string> witness;
    std::uint64_t points = 0;
    if (exhaustive) {
        enumerate_pairs([&](const Vec& a, const Vec& b) {
            ++points;
            if (!witness) witness = fn(a, b);
        });
        out.note = "exhaustive over " + std::to_string(points) + " pairs";
    } else {
        Rng rng(opts.seed ^ seed_salt);
        for (std::uint64_t s = 0; s < opts.budget && !witness; ++s) {
            ++points;
            witness = fn(sample_l(rng), sample_r(rng));
        }
        out.note = "sampled " + std::to_string(points) + " pairs";
    }
    out.pass = !witness;
    out.witness = witness;
}

}  // namespace detail

inline Report verify_pmap_axioms(const FiniteCommAlgebra& A, const PMap& pi, const VerifyOptions& opts = {}) {
    Report rep;
    rep.prime = A.k.modulus();
    const Fp& k = A.k;
    const std::uint64_t p = k.modulus();

    {
        bool ok = pi.images.size() == A.plus.size();
        std::optional<std::string> wit;
        if (!ok) wit = "image table size";
        for (std::size_t t = 0; ok && t < pi.images.size(); ++t)
            if (pi.images[t].size() != A.dim || !A.in_plus_span(pi.images[t])) {
                ok = false;
                wit = "image of " + A.labels[A.plus[t]];
            }
        rep.add("pmap-images-in-plus", ok).witness = wit;
        if (!ok) return rep;
    }

    {
        auto& c = rep.add("pmap-pth-power-zero", true);
        for (std::uint32_t i : A.plus) {
            if (!vec_is_zero(A.power(A.basis_vec(i), p))) {
                c.pass = false;
                c.witness = A.labels[i];
                break;
            }
        }
        c.note = "p-th powers vanish on an ideal basis; Frobenius additivity extends this to all of A_+";
    }

    const std::uint64_t plus_count = checked_pow(p, A.plus.size(), UINT64_MAX / 2).value_or(UINT64_MAX / 2);

    {
        auto& c = rep.add("pmap-sum-rule", true);
        detail::pairwise_check(
            opts, plus_count, plus_count,
            [&](const std::function<void(const Vec&, const Vec&)>& f) {
                enumerate_span(A, A.plus, [&](const Vec& x) { enumerate_span(A, A.plus, [&](const Vec& y) { f(x, y); }); });
            },
            [&](Rng& r) { return random_plus_element(A, r); }, [&](Rng& r) { return random_plus_element(A, r); },
            [&](const Vec& x, const Vec& y) -> std::optional<std::string> {
                Vec lhs = eval_pmap(A, pi, vec_add(k, x, y));
                Vec rhs = vec_add(k, vec_add(k, eval_pmap(A, pi, x), eval_pmap(A, pi, y)), pmap_correction(A, x, y));
                if (lhs != rhs) return "pi(x+y) != pi(x)+pi(y)+corr at x=" + A.to_string(x) + ", y=" + A.to_string(y);
                if (pmap_correction(A, x, y) != pmap_correction(A, y, x))
                    return "correction asymmetry at x=" + A.to_string(x) + ", y=" + A.to_string(y);
                return std::nullopt;
            },
            c, 1);
    }

    {
        auto& c = rep.add("pmap-products-vanish", true);
        detail::pairwise_check(
            opts, plus_count, plus_count,
            [&](const std::function<void(const Vec&, const Vec&)>& f) {
                enumerate_span(A, A.plus, [&](const Vec& x) { enumerate_span(A, A.plus, [&](const Vec& y) { f(x, y); }); });
            },
            [&](Rng& r) { return random_plus_element(A, r); }, [&](Rng& r) { return random_plus_element(A, r); },
            [&](const Vec& x, const Vec& y) -> std::optional<std::string> {
                if (!vec_is_zero(eval_pmap(A, pi, A.multiply(x, y))))
                    return "pi(x*y) != 0 at x=" + A.to_string(x) + ", y=" + A.to_string(y);
                return std::nullopt;
            },
            c, 2);
    }

    {
        auto& c = rep.add("pmap-semilinear-scaling", true);
        const std::vector<std::uint32_t> zidx = A.zero_part_indices();
        const std::uint64_t zero_count = checked_pow(p, zidx.size(), UINT64_MAX / 2).value_or(UINT64_MAX / 2);
        detail::pairwise_check(
            opts, zero_count, plus_count,
            [&](const std::function<void(const Vec&, const Vec&)>& f) {
                enumerate_span(A, zidx, [&](const Vec& a) { enumerate_span(A, A.plus, [&](const Vec& x) { f(a, x); }); });
            },
            [&](Rng& r) { return random_span_element(A, zidx, r); }, [&](Rng& r) { return random_plus_element(A, r); },
            [&](const Vec& a0, const Vec& x) -> std::optional<std::string> {
                Vec lhs = eval_pmap(A, pi, A.multiply(a0, x));
                Vec rhs = A.multiply(A.power(a0, p), eval_pmap(A, pi, x));
                if (lhs != rhs) return "pi(a0*x) != a0^p*pi(x) at a0=" + A.to_string(a0) + ", x=" + A.to_string(x);
                return std::nullopt;
            },
            c, 3);
    }

    return rep;
}

// Admissible modification of a p-map: an additive semilinear phi vanishing on
// A_+^2, recorded like a PMap.  Additivity and semilinearity hold because phi
// is given by images on a basis; vanishing on A_+^2 is checked on the
// spanning set of basis products.
inline PMap shift_pmap(const FiniteCommAlgebra& A, const PMap& pi, const PMap& phi) {
    if (phi.images.size() != A.plus.size()) throw DimensionMismatch("shift_pmap");
    auto apply_phi = [&](const Vec& v) {
        Vec out = A.zero();
        for (std::size_t t = 0; t < A.plus.size(); ++t)
            if (v[A.plus[t]]) vec_add_scaled(A.k, out, phi.images[t], v[A.plus[t]]);
        return out;
    };
    for (std::size_t t = 0; t < phi.images.size(); ++t)
        if (!A.in_plus_span(phi.images[t]))
            throw InvalidShift("image of " + A.labels[A.plus[t]] + " outside A_+");
    for (std::uint32_t i : A.plus)
        for (std::uint32_t j : A.plus) {
            Vec prod = A.multiply(A.basis_vec(i), A.basis_vec(j));
            if (!A.in_plus_span(prod)) throw InvalidShift("product outside A_+");
            if (!vec_is_zero(apply_phi(prod)))
                throw InvalidShift("phi(" + A.labels[i] + "*" + A.labels[j] + ") = " + A.to_string(apply_phi(prod)));
        }
    PMap out;
    out.images.reserve(A.plus.size());
    for (std::size_t t = 0; t < A.plus.size(); ++t) out.images.push_back(vec_add(A.k, pi.images[t], phi.images[t]));
    return out;
}

// gamma_n(x) for n = sum n_i p^i: (prod n_i!)^{-1} * prod (pi^{(i)}(x))^{n_i},
// where pi^{(i)} is the i-fold iterate.  Each digit satisfies n_i < p so the
// factorials are units.
inline Vec reconstruct_gamma(const FiniteCommAlgebra& A, const PMap& pi, std::uint64_t n, const Vec& x) {
    if (!A.in_plus_span(x)) throw NotInPlusPart();
    const Fp& k = A.k;
    if (n == 0) return A.unit();
    Vec gamma = A.unit();
    Scalar fact = 1;
    Vec iter = x;
    std::uint64_t rest = n;
    const std::uint64_t p = k.modulus();
    while (rest) {
        std::uint64_t digit = rest % p;
        rest /= p;
        if (digit) {
            gamma = A.multiply(gamma, A.power(iter, digit));
            fact = k.mul(fact, factorial_mod_p(k, digit));
        }
        if (rest) iter = eval_pmap(A, pi, iter);
    }
    return vec_scale(k, gamma, k.inv(fact));
}

struct PIdealCheck {
    bool is_ideal = true;
    bool is_p_stable = true;
    std::optional<std::string> witness;
    bool ok() const { return is_ideal && is_p_stable; }
};

// Ideal closure on a basis and pi-stability on a basis suffice: the sum-rule
// corrections between ideal elements are products landing back in the ideal.
inline PIdealCheck is_p_ideal(const FiniteCommAlgebra& A, const PMap& pi, const Subspace& J) {
    PIdealCheck out;
    if (J.ambient_dim() != A.dim) throw DimensionMismatch("is_p_ideal");
    for (const Vec& b : J.basis()) {
        if (!A.in_plus_span(b)) {
            out.is_ideal = false;
            out.witness = "generator outside A_+: " + A.to_string(b);
            return out;
        }
    }
    for (const Vec& b : J.basis())
        for (std::size_t i = 1; i < A.dim; ++i) {
            Vec prod = A.multiply(A.basis_vec(i), b);
            if (!J.member(prod)) {
                out.is_ideal = false;
                out.witness = A.labels[i] + " * (" + A.to_string(b) + ")";
                return out;
            }
        }
    for (const Vec& b : J.basis())
        if (!J.member(eval_pmap(A, pi, b))) {
            out.is_p_stable = false;
            out.witness = "pi(" + A.to_string(b) + ") = " + A.to_string(eval_pmap(A, pi, b));
            return out;
        }
    return out;
}

struct QuotientAlgebra {
    FiniteCommAlgebra alg;
    PMap pi;
    Matrix projection;               // coordinates of the canonical map A -> A/J
    std::vector<std::size_t> rep_indices;  // A-basis index represented by each quotient basis vector
};

inline QuotientAlgebra quotient_algebra(const FiniteCommAlgebra& A, const PMap& pi, const Subspace& J) {
    PIdealCheck chk = is_p_ideal(A, pi, J);
    if (!chk.ok()) throw NotAPIdeal(chk.witness.value_or(""));
    QuotientSpace Q = QuotientSpace::of_full_space(J);

    std::vector<std::size_t> rep_idx;
    for (const Vec& r : Q.reps()) {
        std::size_t nz = 0;
        for (std::size_t m = 0; m < r.size(); ++m)
            if (r[m]) nz = m;
        rep_idx.push_back(nz);
    }

    std::vector<std::string> labels;
    std::vector<std::uint32_t> plus;
    for (std::size_t t = 0; t < rep_idx.size(); ++t) {
        labels.push_back(A.labels[rep_idx[t]]);
        if (A.is_plus[rep_idx[t]]) plus.push_back(static_cast<std::uint32_t>(t));
    }
    if (rep_idx.empty() || rep_idx[0] != 0) throw NotAPIdeal("unit index absorbed by the ideal");

    FiniteCommAlgebra B(A.k, std::move(labels), std::move(plus));
    for (std::size_t i = 0; i < B.dim; ++i)
        for (std::size_t j = i; j < B.dim; ++j) {
            if (i == 0) continue;
            Vec prod = A.multiply(Q.reps()[i], Q.reps()[j]);
            B.set_product_dense(i, j, Q.coords(prod));
        }

    PMap piB;
    piB.images.reserve(B.plus.size());
    for (std::uint32_t t : B.plus) piB.images.push_back(Q.coords(eval_pmap(A, pi, Q.reps()[t])));

    std::vector<Vec> cols;
    for (std::size_t j = 0; j < A.dim; ++j) cols.push_back(Q.coords(A.basis_vec(j)));
    Matrix proj = Matrix::from_columns(A.k, B.dim, cols);

    return QuotientAlgebra{std::move(B), std::move(piB), std::move(proj), std::move(rep_idx)};
}

// Quotient by an ideal that may meet the zero part of the pregrading.  Such
// an ideal splits as (J cap A_0) + (J cap A_+): the zero-part component of an
// ideal element is obtained by multiplying away the plus part, so both
// components lie in J whenever the zero part is a subalgebra.  The quotient
// keeps the induced splitting; rep_indices stays empty because the adapted
// basis mixes original basis vectors.
inline QuotientAlgebra pregraded_quotient(const FiniteCommAlgebra& A, const PMap& pi, const Subspace& J) {
    bool inside_plus = true;
    for (const Vec& b : J.basis())
        if (!A.in_plus_span(b)) {
            inside_plus = false;
            break;
        }
    if (inside_plus) return quotient_algebra(A, pi, J);
    if (J.dim() == A.dim) throw NotAPIdeal("quotient by the whole algebra");

    const Fp& k = A.k;
    for (const Vec& b : J.basis())
        for (std::size_t i = 1; i < A.dim; ++i)
            if (!J.member(A.multiply(A.basis_vec(i), b)))
                throw NotAPIdeal(A.labels[i] + " * (" + A.to_string(b) + ")");

    std::vector<Vec> plus_basis, zero_basis;
    for (std::uint32_t i : A.plus) plus_basis.push_back(A.basis_vec(i));
    for (std::uint32_t i : A.zero_part_indices()) zero_basis.push_back(A.basis_vec(i));
    Subspace Jplus = J.intersect(Subspace::span(k, A.dim, plus_basis));
    Subspace Jzero = J.intersect(Subspace::span(k, A.dim, zero_basis));
    if (Jplus.dim() + Jzero.dim() != J.dim())
        throw NotAPIdeal("ideal does not split along the pregrading");
    for (const Vec& b : Jplus.basis())
        if (!J.member(eval_pmap(A, pi, b)))
            throw NotAPIdeal("pi(" + A.to_string(b) + ") leaves the ideal");

    QuotientSpace Q = QuotientSpace::of_full_space(J);
    const std::size_t m = Q.dim();

    std::vector<Vec> pbar;
    for (std::uint32_t i : A.plus) pbar.push_back(Q.coords(A.basis_vec(i)));
    Subspace P = Subspace::span(k, m, pbar);

    // adapted basis: unit image, a completion of the zero-part image, then P
    std::vector<Vec> nb{Q.coords(A.unit())};
    Subspace picked = Subspace::span(k, m, nb);
    for (std::uint32_t i : A.zero_part_indices()) {
        Vec c = Q.coords(A.basis_vec(i));
        Subspace next = picked.sum(Subspace::span(k, m, {c}));
        if (next.dim() > picked.dim()) {
            nb.push_back(std::move(c));
            picked = std::move(next);
        }
    }
    const std::size_t zdim = nb.size();
    for (const Vec& b : P.basis()) nb.push_back(b);

    auto ninv = inverse_matrix(Matrix::from_columns(k, m, nb));
    if (!ninv) throw NotAPIdeal("ideal does not split along the pregrading");

    std::vector<std::string> labels;
    std::vector<std::uint32_t> plus;
    std::vector<Vec> lifts;
    for (std::size_t t = 0; t < m; ++t) {
        lifts.push_back(Q.lift(nb[t]));
        labels.push_back("[" + A.to_string(lifts.back()) + "]");
        if (t >= zdim) plus.push_back(static_cast<std::uint32_t>(t));
    }

    FiniteCommAlgebra B(k, std::move(labels), std::move(plus));
    for (std::size_t i = 1; i < m; ++i)
        for (std::size_t j = i; j < m; ++j)
            B.set_product_dense(i, j, ninv->apply(Q.coords(A.multiply(lifts[i], lifts[j]))));

    // the plus-part basis needs lifts inside A_+ for the induced p-map
    Matrix G = Matrix::from_columns(k, m, pbar);
    PMap piB;
    for (std::size_t t = zdim; t < m; ++t) {
        auto coeff = solve(G, nb[t]);
        if (!coeff) throw NotAPIdeal("ideal does not split along the pregrading");
        Vec lift_plus = A.zero();
        for (std::size_t s = 0; s < A.plus.size(); ++s)
            if ((*coeff)[s]) vec_add_scaled(k, lift_plus, A.basis_vec(A.plus[s]), (*coeff)[s]);
        piB.images.push_back(ninv->apply(Q.coords(eval_pmap(A, pi, lift_plus))));
    }

    std::vector<Vec> cols;
    for (std::size_t j = 0; j < A.dim; ++j) cols.push_back(ninv->apply(Q.coords(A.basis_vec(j))));
    Matrix proj = Matrix::from_columns(k, m, cols);

    return QuotientAlgebra{std::move(B), std::move(piB), std::move(proj), {}};
}

// Ideal generated by a set of elements: saturate the span under basis multiplication.
inline Subspace ideal_generated_by(const FiniteCommAlgebra& A, std::vector<Vec> gens) {
    Subspace J = Subspace::span(A.k, A.dim, gens);
    while (true) {
        std::vector<Vec> next = J.basis();
        bool grew = false;
        for (const Vec& b : J.basis())
            for (std::size_t i = 1; i < A.dim; ++i) {
                Vec prod = A.multiply(A.basis_vec(i), b);
                if (!J.member(prod)) {
                    next.push_back(prod);
                    grew = true;
                }
            }
        if (!grew) return J;
        J = Subspace::span(A.k, A.dim, std::move(next));
    }
}

}  // namespace dpw
