#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpw/algebra.hpp"

namespace dpw {

struct PDAlgebra {
    FiniteCommAlgebra A;
    PMap pi;
};

// k[x]/x^p with the zero p-map (x^p = 0 makes the ideal basis p-nilpotent).
inline PDAlgebra truncated_polynomial_algebra(const Fp& k) {
    const std::uint64_t p = k.modulus();
    std::vector<std::string> labels{"1"};
    std::vector<std::uint32_t> plus;
    for (std::uint64_t i = 1; i < p; ++i) {
        labels.push_back(i == 1 ? "x" : "x" + std::to_string(i));
        plus.push_back(static_cast<std::uint32_t>(i));
    }
    FiniteCommAlgebra A(k, std::move(labels), std::move(plus));
    for (std::uint64_t i = 1; i < p; ++i)
        for (std::uint64_t j = i; j < p; ++j) {
            if (i + j < p) A.set_product(i, j, {Term{static_cast<std::uint32_t>(i + j), 1}});
            else A.set_product(i, j, {});
        }
    PMap pi = PMap::zero(A);
    return PDAlgebra{std::move(A), std::move(pi)};
}

namespace detail {

struct MonomialBasis {
    std::vector<std::vector<std::uint64_t>> expos;  // basis position -> exponent vector
    std::vector<std::uint64_t> bounds;              // per-variable bound p^{m_i}
};

inline std::string monomial_label(const std::vector<std::uint64_t>& a) {
    std::string s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        s += "x" + std::to_string(i + 1);
        if (a[i] >= 2) s += "^(" + std::to_string(a[i]) + ")";
    }
    return s.empty() ? "1" : s;
}

}  // namespace detail

// Height-truncated divided power algebra on n variables: basis x^(a) with
// 0 <= a_i < p^{m_i}, products by binomial coefficients, p-map sending a pure
// power x_i^(r) to dp_compose_coeff(r) x_i^(pr), truncated to zero out of
// range, and killing mixed monomials.
inline PDAlgebra divided_power_algebra(const Fp& k, const std::vector<std::uint64_t>& heights,
                                       std::size_t dim_cap = 4096) {
    const std::uint64_t p = k.modulus();
    const std::size_t n = heights.size();
    if (n == 0) throw Error("divided power algebra needs at least one variable");
    detail::MonomialBasis mb;
    mb.bounds.resize(n);
    std::uint64_t dim = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (heights[i] == 0) throw Error("height must be positive");
        auto b = checked_pow(p, heights[i], dim_cap);
        if (!b) throw DimensionCapExceeded(dim_cap + 1, dim_cap);
        mb.bounds[i] = *b;
        if (dim > dim_cap / *b) throw DimensionCapExceeded(dim_cap + 1, dim_cap);
        dim *= *b;
    }

    std::vector<std::uint64_t> cur(n, 0);
    for (std::uint64_t c = 0; c < dim; ++c) {
        mb.expos.push_back(cur);
        for (std::size_t i = n; i-- > 0;) {
            if (++cur[i] < mb.bounds[i]) break;
            cur[i] = 0;
        }
    }

    std::vector<std::string> labels;
    std::vector<std::uint32_t> plus;
    for (std::uint64_t c = 0; c < dim; ++c) {
        labels.push_back(detail::monomial_label(mb.expos[c]));
        if (c != 0) plus.push_back(static_cast<std::uint32_t>(c));
    }

    auto index_of = [&](const std::vector<std::uint64_t>& a) {
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < n; ++i) idx = idx * mb.bounds[i] + a[i];
        return idx;
    };

    FiniteCommAlgebra A(k, std::move(labels), std::move(plus));
    for (std::uint64_t ci = 1; ci < dim; ++ci)
        for (std::uint64_t cj = ci; cj < dim; ++cj) {
            const auto& a = mb.expos[ci];
            const auto& b = mb.expos[cj];
            std::vector<std::uint64_t> sum(n);
            bool in_range = true;
            Scalar coeff = 1;
            for (std::size_t i = 0; i < n && in_range; ++i) {
                sum[i] = a[i] + b[i];
                if (sum[i] >= mb.bounds[i]) in_range = false;
                else coeff = k.mul(coeff, binom_mod_p(k, sum[i], a[i]));
            }
            if (in_range && coeff)
                A.set_product(ci, cj, {Term{static_cast<std::uint32_t>(index_of(sum)), coeff}});
            else
                A.set_product(ci, cj, {});
        }

    PMap pi = PMap::zero(A);
    for (std::size_t t = 0; t < A.plus.size(); ++t) {
        const auto& a = mb.expos[A.plus[t]];
        std::size_t support = 0, var = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (a[i]) {
                ++support;
                var = i;
            }
        if (support != 1) continue;  // mixed monomials are products of ideal elements
        std::uint64_t r = a[var];
        Scalar c = dp_compose_coeff(k, r);
        if (!c || r > (mb.bounds[var] - 1) / p) continue;
        std::vector<std::uint64_t> img(n, 0);
        img[var] = p * r;
        pi.images[t][index_of(img)] = c;
    }

    return PDAlgebra{std::move(A), std::move(pi)};
}

struct TensorSquare {
    FiniteCommAlgebra T;
    PMap pi;
    Matrix mu;        // multiplication map T -> A
    std::size_t adim; // basis index (i, j) of T sits at i*adim + j
};

// A tensor A with the coordinatewise product and the p-map seeded by
// pi(a ox 1) = pi(a) ox 1, pi(1 ox a) = 1 ox pi(a), and zero on
// (A_+ ox 1)(1 ox A_+) products.
inline TensorSquare tensor_square(const PDAlgebra& base, std::size_t dim_cap = 4096) {
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    const std::size_t d = A.dim;
    if (d == 0 || d > dim_cap / d) throw DimensionCapExceeded(d * d, dim_cap);
    const std::size_t dt = d * d;

    std::vector<std::string> labels;
    std::vector<std::uint32_t> plus;
    labels.reserve(dt);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            if (i == 0 && j == 0) labels.push_back("1(x)1");
            else if (j == 0) labels.push_back(A.labels[i] + "(x)1");
            else if (i == 0) labels.push_back("1(x)" + A.labels[j]);
            else labels.push_back(A.labels[i] + "(x)" + A.labels[j]);
            if (i || j) plus.push_back(static_cast<std::uint32_t>(i * d + j));
        }

    FiniteCommAlgebra T(k, std::move(labels), std::move(plus));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t l = 0; l < d; ++l)
                for (std::size_t m = 0; m < d; ++m) {
                    std::size_t lhs = i * d + j, rhs = l * d + m;
                    if (lhs > rhs || (lhs == 0)) continue;
                    SparseRow r;
                    for (const Term& t1 : A.row(i, l))
                        for (const Term& t2 : A.row(j, m))
                            r.push_back(Term{static_cast<std::uint32_t>(t1.idx * d + t2.idx), k.mul(t1.c, t2.c)});
                    T.set_product(lhs, rhs, std::move(r));
                }

    PMap pi = PMap::zero(T);
    for (std::size_t t = 0; t < T.plus.size(); ++t) {
        std::size_t idx = T.plus[t];
        std::size_t i = idx / d, j = idx % d;
        if (j == 0) {
            const Vec& img = base.pi.images[A.plus_pos[i]];
            for (std::size_t m = 0; m < d; ++m) pi.images[t][m * d] = img[m];
        } else if (i == 0) {
            const Vec& img = base.pi.images[A.plus_pos[j]];
            for (std::size_t m = 0; m < d; ++m) pi.images[t][m] = img[m];
        }
        // i, j >= 1: a product of two ideal elements, image stays zero
    }

    Matrix mu(k, d, dt);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (const Term& t : A.row(i, j)) mu.at(t.idx, i * d + j) = k.add(mu.at(t.idx, i * d + j), t.c);

    return TensorSquare{std::move(T), std::move(pi), std::move(mu), d};
}

inline Vec tensor_pure(const FiniteCommAlgebra& A, const Vec& a, const Vec& b) {
    Vec t(A.dim * A.dim, 0);
    for (std::size_t i = 0; i < A.dim; ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < A.dim; ++j)
            if (b[j]) t[i * A.dim + j] = A.k.mul(a[i], b[j]);
    }
    return t;
}

enum class LocalizedShape { Isomorphic, Zero, Proper };

struct LocalizedAlgebra {
    PDAlgebra Af;
    Matrix canonical;        // A -> A_f
    Vec inverse_of_f;        // coordinates of 1/f in A_f (empty when A_f = 0)
    LocalizedShape shape = LocalizedShape::Proper;
};

// A_f realized as A / tau with tau the f-power-torsion ideal: on the
// quotient, multiplication by f is invertible, which is exactly A[t]/(tf-1)
// for finite-dimensional A.  Augmented inputs degenerate: units give A back,
// ideal elements are nilpotent and kill everything.
inline LocalizedAlgebra localize_algebra(const PDAlgebra& base, const Vec& f) {
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    Matrix mf = A.multiplication_operator(f);
    Subspace tau = kernel(mf.power(A.dim));

    if (tau.dim() == A.dim) {
        FiniteCommAlgebra Z(k, {}, {});
        Matrix canonical(k, 0, A.dim);
        return LocalizedAlgebra{PDAlgebra{std::move(Z), PMap{}}, std::move(canonical), Vec{}, LocalizedShape::Zero};
    }

    QuotientAlgebra q = pregraded_quotient(A, base.pi, tau);
    Vec fbar = q.projection.apply(f);
    Matrix mfbar = q.alg.multiplication_operator(fbar);
    auto ginv = solve(mfbar, q.alg.unit());
    if (!ginv) throw Error("localization: multiplication by f not invertible off its torsion");
    LocalizedShape shape = tau.dim() == 0 ? LocalizedShape::Isomorphic : LocalizedShape::Proper;
    return LocalizedAlgebra{PDAlgebra{std::move(q.alg), std::move(q.pi)}, std::move(q.projection), std::move(*ginv), shape};
}

}  // namespace dpw
