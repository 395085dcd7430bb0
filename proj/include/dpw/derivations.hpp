#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dpw/beck.hpp"

namespace dpw {

struct BasisInsufficiency : Error {
    explicit BasisInsufficiency(const std::string& w)
        : Error("constraints at every checked point still leave a violation: " + w) {}
};

// A derivation D: A -> M is stored as its mdim x dim matrix, column j the
// image of e_j.  A solve keeps the module alongside the basis so brackets
// and audits have their context.
struct DerivationSolve {
    BeckModule module;
    std::vector<Matrix> basis;
    bool basis_refined = false;  // ideal-basis constraints were not enough
};

namespace detail {

// Rows of the flattened system on D[s][t] (row-major, s*dim + t).
inline void leibniz_rows(const BeckModule& M, std::vector<Vec>& rows) {
    const FiniteCommAlgebra& A = M.A;
    const Fp& k = A.k;
    const std::size_t d = A.dim, n = M.mdim;
    for (std::size_t s = 0; s < n; ++s) {
        Vec r(n * d, 0);
        r[s * d] = 1;  // D(1) = 0
        rows.push_back(std::move(r));
    }
    for (std::size_t i = 1; i < d; ++i)
        for (std::size_t j = i; j < d; ++j)
            for (std::size_t s = 0; s < n; ++s) {
                Vec r(n * d, 0);
                for (const Term& t : A.row(i, j)) r[s * d + t.idx] = k.add(r[s * d + t.idx], t.c);
                for (std::size_t u = 0; u < n; ++u) {
                    r[u * d + j] = k.sub(r[u * d + j], M.action[i].at(s, u));
                    r[u * d + i] = k.sub(r[u * d + i], M.action[j].at(s, u));
                }
                rows.push_back(std::move(r));
            }
}

// D(pi(a)) - piM(D(a)) + a^{p-1} D(a) = 0, linear in D for fixed a.
inline void beck_rows_at(const PDAlgebra& base, const BeckModule& M, const Vec& a, std::vector<Vec>& rows) {
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    const std::size_t d = A.dim, n = M.mdim;
    Vec pia = eval_pmap(A, base.pi, a);
    Matrix pow = M.act(A.power(a, k.modulus() - 1));
    for (std::size_t s = 0; s < n; ++s) {
        Vec r(n * d, 0);
        for (std::size_t t = 0; t < d; ++t) r[s * d + t] = k.add(r[s * d + t], pia[t]);
        for (std::size_t t = 0; t < d; ++t) {
            if (!a[t]) continue;
            for (std::size_t u = 0; u < n; ++u) {
                r[u * d + t] = k.sub(r[u * d + t], k.mul(a[t], M.piM.at(s, u)));
                r[u * d + t] = k.add(r[u * d + t], k.mul(a[t], pow.at(s, u)));
            }
        }
        rows.push_back(std::move(r));
    }
}

inline Vec beck_defect(const PDAlgebra& base, const BeckModule& M, const Matrix& D, const Vec& a) {
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    Vec lhs = D.apply(eval_pmap(A, base.pi, a));
    Vec da = D.apply(a);
    Vec rhs = M.piM.apply(da);
    Vec shift = M.act(A.power(a, k.modulus() - 1)).apply(da);
    for (std::size_t s = 0; s < M.mdim; ++s) lhs[s] = k.add(k.sub(lhs[s], rhs[s]), shift[s]);
    return lhs;
}

inline std::vector<Matrix> solve_rows(const Fp& k, std::size_t n, std::size_t d, const std::vector<Vec>& rows) {
    Subspace sol = kernel(Matrix::from_rows(k, n * d, rows));
    std::vector<Matrix> basis;
    basis.reserve(sol.dim());
    for (const Vec& v : sol.basis()) basis.push_back(Matrix::unflatten(k, n, d, v));
    return basis;
}

}  // namespace detail

inline bool is_derivation(const BeckModule& M, const Matrix& D) {
    const FiniteCommAlgebra& A = M.A;
    if (D.rows() != M.mdim || D.cols() != A.dim) return false;
    if (!vec_is_zero(D.apply(A.unit()))) return false;
    for (std::size_t i = 1; i < A.dim; ++i)
        for (std::size_t j = i; j < A.dim; ++j) {
            Vec lhs = D.apply(A.multiply(A.basis_vec(i), A.basis_vec(j)));
            Vec rhs = M.action[i].apply(D.apply(A.basis_vec(j)));
            vec_add_scaled(A.k, rhs, M.action[j].apply(D.apply(A.basis_vec(i))), 1);
            if (lhs != rhs) return false;
        }
    return true;
}

inline DerivationSolve derivations(const PDAlgebra& base, const BeckModule& M) {
    if (!same_algebra(base.A, M.A)) throw AlgebraMismatch();
    if (!verify_beck_module(M).all_pass()) throw Error("derivation solve over an invalid module");
    std::vector<Vec> rows;
    detail::leibniz_rows(M, rows);
    std::vector<Matrix> basis = detail::solve_rows(M.A.k, M.mdim, M.A.dim, rows);
    for (const Matrix& D : basis)
        if (!is_derivation(M, D)) throw Error("derivation solver output fails Leibniz");
    return DerivationSolve{M, std::move(basis), false};
}

// Two-phase solve: constraints at the ideal basis, then revalidation over
// all of A_+ below the cap (samples above it); a violation triggers one
// re-solve with constraints at every checked point.
inline DerivationSolve beck_derivations(const PDAlgebra& base, const BeckModule& M,
                                        const VerifyOptions& opts = {}) {
    if (!same_algebra(base.A, M.A)) throw AlgebraMismatch();
    if (!verify_beck_module(M).all_pass()) throw Error("derivation solve over an invalid module");
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;

    std::vector<Vec> rows;
    detail::leibniz_rows(M, rows);
    for (std::uint32_t i : A.plus) detail::beck_rows_at(base, M, A.basis_vec(i), rows);
    std::vector<Matrix> basis = detail::solve_rows(k, M.mdim, A.dim, rows);

    bool exhaustive = checked_pow(k.modulus(), A.plus.size(), 729).has_value();
    auto violations = [&](const std::vector<Matrix>& cand, std::uint64_t salt, std::vector<Vec>* collect) {
        bool found = false;
        auto probe = [&](const Vec& a) {
            for (const Matrix& D : cand)
                if (!vec_is_zero(detail::beck_defect(base, M, D, a))) {
                    found = true;
                    if (collect) collect->push_back(a);
                    return;
                }
        };
        if (exhaustive) {
            enumerate_span(A, A.plus, probe);
        } else {
            Rng rng(opts.seed ^ salt);
            for (std::uint64_t s = 0; s < opts.budget; ++s) probe(random_plus_element(A, rng));
        }
        return found;
    };

    std::vector<Vec> bad;
    bool refined = false;
    if (violations(basis, 0xbecdULL, &bad)) {
        refined = true;
        if (exhaustive) {
            enumerate_span(A, A.plus, [&](const Vec& a) { detail::beck_rows_at(base, M, a, rows); });
        } else {
            Rng rng(opts.seed ^ 0xbecdULL);
            for (std::uint64_t s = 0; s < opts.budget; ++s)
                detail::beck_rows_at(base, M, random_plus_element(A, rng), rows);
        }
        basis = detail::solve_rows(k, M.mdim, A.dim, rows);
        // a fresh sample stream gives the refined basis a second opinion
        if (violations(basis, 0xbecd2ULL, nullptr))
            throw BasisInsufficiency(A.to_string(bad.empty() ? A.zero() : bad.front()));
    }

    for (const Matrix& D : basis) {
        if (!is_derivation(M, D)) throw Error("derivation solver output fails Leibniz");
        for (std::uint32_t i : A.plus)
            if (!vec_is_zero(detail::beck_defect(base, M, D, A.basis_vec(i))))
                throw Error("derivation solver output fails its defining identity");
    }
    return DerivationSolve{M, std::move(basis), refined};
}

// Beck derivations into (A, 0), cross-checked against the divided-power
// identity D(gamma_n(x)) = gamma_{n-1}(x) D(x) for n <= p.
inline DerivationSolve special_derivations(const PDAlgebra& base, const VerifyOptions& opts = {}) {
    DerivationSolve out = beck_derivations(base, trivial_module(base), opts);
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    const std::uint64_t p = k.modulus();

    auto check_at = [&](const Vec& x) {
        for (const Matrix& D : out.basis)
            for (std::uint64_t n = 2; n <= p; ++n) {
                Vec lhs = D.apply(reconstruct_gamma(A, base.pi, n, x));
                Vec rhs = A.multiply(reconstruct_gamma(A, base.pi, n - 1, x), D.apply(x));
                if (lhs != rhs) throw Error("special derivation fails the divided-power identity at " + A.to_string(x));
            }
    };
    if (checked_pow(p, A.plus.size(), 729))
        enumerate_span(A, A.plus, check_at);
    else {
        Rng rng(opts.seed ^ 0x5becULL);
        for (std::uint64_t s = 0; s < opts.budget; ++s) check_at(random_plus_element(A, rng));
    }
    return out;
}

// Commutator of two self-maps of A; defined for derivations valued in the
// algebra itself, where composition makes sense.
inline Matrix lie_bracket(const Matrix& d1, const Matrix& d2) {
    if (d1.rows() != d1.cols() || d2.rows() != d2.cols() || d1.rows() != d2.rows())
        throw DimensionMismatch("lie_bracket");
    Matrix a = d1.times(d2);
    Matrix b = d2.times(d1);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) a.at(i, j) = d1.field().sub(a.at(i, j), b.at(i, j));
    return a;
}

}  // namespace dpw
