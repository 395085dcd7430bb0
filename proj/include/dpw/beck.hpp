#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dpw/constructions.hpp"

namespace dpw {

struct AlgebraMismatch : Error {
    AlgebraMismatch() : Error("modules live over different algebras") {}
};

struct NotAdditive : Error {
    explicit NotAdditive(const std::string& w) : Error("p-map restriction is not additive: " + w) {}
};

struct NotStable : Error {
    explicit NotStable(const std::string& w) : Error("subspace is not stable: " + w) {}
};

struct CapExceeded : Error {
    explicit CapExceeded(const std::string& w) : Error("enumeration cap exceeded: " + w) {}
};

struct NotHomomorphism : Error {
    explicit NotHomomorphism(const std::string& w) : Error("map is not a homomorphism: " + w) {}
};

// A module with a p-operator: the action of each algebra basis element plus
// the matrix of the p-operator.  The p-operator of interest is additive and
// F_p-linear, kills the image of the ideal action, and is Frobenius-twisted
// on the zero part.  The base algebra is held by value: modules outlive the
// expressions that built them.
struct BeckModule {
    FiniteCommAlgebra A;
    PMap pi;
    std::size_t mdim;
    std::vector<std::string> labels;
    std::vector<Matrix> action;  // one matrix per A-basis index
    Matrix piM;

    Matrix act(const Vec& a) const {
        if (a.size() != A.dim) throw DimensionMismatch("BeckModule::act");
        Matrix r(A.k, mdim, mdim);
        for (std::size_t i = 0; i < A.dim; ++i)
            if (a[i]) r = r.plus(action[i].scaled(a[i]));
        return r;
    }

    std::string coord_string(const Vec& m) const {
        std::string s;
        for (std::size_t i = 0; i < mdim; ++i) {
            if (!m[i]) continue;
            if (!s.empty()) s += " + ";
            if (m[i] != 1) s += std::to_string(m[i]) + "*";
            s += labels[i];
        }
        return s.empty() ? "0" : s;
    }
};

inline bool same_algebra(const FiniteCommAlgebra& x, const FiniteCommAlgebra& y) {
    return x.k.modulus() == y.k.modulus() && x.dim == y.dim && x.labels == y.labels && x.plus == y.plus &&
           x.table == y.table;
}

// The module (A, 0): A acting on itself, zero p-operator.
inline BeckModule trivial_module(const PDAlgebra& base) {
    const FiniteCommAlgebra& A = base.A;
    std::vector<Matrix> action;
    action.reserve(A.dim);
    for (std::size_t i = 0; i < A.dim; ++i) action.push_back(A.multiplication_operator(A.basis_vec(i)));
    return BeckModule{A, base.pi, A.dim, A.labels, std::move(action), Matrix(A.k, A.dim, A.dim)};
}

inline BeckModule zero_module(const PDAlgebra& base) {
    const FiniteCommAlgebra& A = base.A;
    std::vector<Matrix> action(A.dim, Matrix(A.k, 0, 0));
    return BeckModule{A, base.pi, 0, {}, std::move(action), Matrix(A.k, 0, 0)};
}

// U with the multiplication action and the restricted p-map as p-operator.
// For U inside A_+: the restriction must be additive, which is exactly the
// vanishing of all sum-rule corrections inside U; checked exhaustively below
// the cap, sampled above it.  A subspace leaving A_+ is accepted only when
// the p-map is identically zero (the restriction then extends by zero).
inline BeckModule module_from_pmap_restriction(const PDAlgebra& base, const Subspace& U,
                                               const VerifyOptions& opts = {}) {
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    if (U.ambient_dim() != A.dim) throw DimensionMismatch("module_from_pmap_restriction");

    bool inside_plus = true;
    for (const Vec& u : U.basis())
        if (!A.in_plus_span(u)) {
            inside_plus = false;
            break;
        }
    if (!inside_plus) {
        for (const Vec& img : base.pi.images)
            if (!vec_is_zero(img))
                throw NotStable("subspace leaves A_+ and the p-map is nonzero");
    }

    for (const Vec& u : U.basis())
        for (std::size_t i = 1; i < A.dim; ++i)
            if (!U.member(A.multiply(A.basis_vec(i), u)))
                throw NotStable(A.labels[i] + " * (" + A.to_string(u) + ") leaves the subspace");
    if (inside_plus)
        for (const Vec& u : U.basis())
            if (!U.member(eval_pmap(A, base.pi, u)))
                throw NotStable("pi(" + A.to_string(u) + ") leaves the subspace");

    if (inside_plus) {
        const std::uint64_t p = k.modulus();
        std::uint64_t points = checked_pow(p, U.dim(), UINT64_MAX / 2).value_or(UINT64_MAX / 2);
        std::optional<std::string> witness;
        auto check_pair = [&](const Vec& x, const Vec& y) {
            if (!witness && !vec_is_zero(pmap_correction(A, x, y)))
                witness = "correction (" + A.to_string(x) + ", " + A.to_string(y) + ") = " +
                          A.to_string(pmap_correction(A, x, y));
        };
        if (points != 0 && points <= opts.cap / points) {
            // odometer over U coefficients
            std::vector<Scalar> cx(U.dim(), 0);
            auto element = [&](const std::vector<Scalar>& c) {
                Vec v = A.zero();
                for (std::size_t i = 0; i < c.size(); ++i) vec_add_scaled(k, v, U.basis()[i], c[i]);
                return v;
            };
            while (true) {
                std::vector<Scalar> cy(U.dim(), 0);
                while (true) {
                    check_pair(element(cx), element(cy));
                    std::size_t t = 0;
                    for (; t < cy.size(); ++t) {
                        if (++cy[t] < p) break;
                        cy[t] = 0;
                    }
                    if (t == cy.size()) break;
                }
                std::size_t t = 0;
                for (; t < cx.size(); ++t) {
                    if (++cx[t] < p) break;
                    cx[t] = 0;
                }
                if (t == cx.size()) break;
            }
        } else {
            Rng rng(opts.seed ^ 0x5eedULL);
            for (std::uint64_t s = 0; s < opts.budget && !witness; ++s) {
                Vec x = A.zero(), y = A.zero();
                for (const Vec& b : U.basis()) {
                    vec_add_scaled(k, x, b, rng.below(p));
                    vec_add_scaled(k, y, b, rng.below(p));
                }
                check_pair(x, y);
            }
        }
        if (witness) throw NotAdditive(*witness);
    }

    std::vector<std::string> labels;
    for (const Vec& u : U.basis()) labels.push_back(A.to_string(u));
    std::vector<Matrix> action;
    action.reserve(A.dim);
    for (std::size_t i = 0; i < A.dim; ++i) {
        std::vector<Vec> cols;
        for (const Vec& u : U.basis()) cols.push_back(U.coordinates(A.multiply(A.basis_vec(i), u)));
        action.push_back(Matrix::from_columns(k, U.dim(), cols));
    }
    std::vector<Vec> picols;
    for (const Vec& u : U.basis()) {
        if (inside_plus)
            picols.push_back(U.coordinates(eval_pmap(A, base.pi, u)));
        else
            picols.push_back(Vec(U.dim(), 0));
    }
    Matrix piM = Matrix::from_columns(k, U.dim(), picols);
    return BeckModule{A, base.pi, U.dim(), std::move(labels), std::move(action), std::move(piM)};
}

inline Report verify_beck_module(const BeckModule& M) {
    Report rep;
    rep.prime = M.A.k.modulus();
    const FiniteCommAlgebra& A = M.A;
    const Fp& k = A.k;

    {
        bool ok = M.action.size() == A.dim && M.piM.rows() == M.mdim && M.piM.cols() == M.mdim;
        for (const Matrix& m : M.action)
            if (m.rows() != M.mdim || m.cols() != M.mdim) ok = false;
        auto& c = rep.add("module-shape", ok, {static_cast<std::int64_t>(M.mdim)});
        if (!ok) {
            c.witness = "action table sizes";
            return rep;
        }
    }

    rep.add("module-unit-action", M.action[0] == Matrix::identity(k, M.mdim));

    {
        auto& c = rep.add("module-action-multiplicative", true);
        for (std::size_t i = 0; i < A.dim && c.pass; ++i)
            for (std::size_t j = i; j < A.dim; ++j) {
                Matrix lhs = M.action[i].times(M.action[j]);
                Matrix rhs(k, M.mdim, M.mdim);
                for (const Term& t : A.row(i, j)) rhs = rhs.plus(M.action[t.idx].scaled(t.c));
                if (!(lhs == rhs)) {
                    c.pass = false;
                    c.witness = "(" + A.labels[i] + ", " + A.labels[j] + ")";
                    break;
                }
            }
    }

    rep.add("module-p-operator-linear", true).note =
        "additivity and F_p-linearity are structural for a stored matrix";

    {
        auto& c = rep.add("module-ideal-kills", true);
        for (std::uint32_t i : A.plus)
            if (!M.piM.times(M.action[i]).is_zero()) {
                c.pass = false;
                c.witness = "P after " + A.labels[i];
                break;
            }
    }

    {
        auto& c = rep.add("module-zero-part-semilinear", true);
        for (std::size_t j = 0; j < A.dim && c.pass; ++j) {
            if (A.is_plus[j]) continue;
            Matrix lhs = M.piM.times(M.action[j]);
            Matrix rhs = M.act(A.power(A.basis_vec(j), k.modulus())).times(M.piM);
            if (!(lhs == rhs)) {
                c.pass = false;
                c.witness = "P after " + A.labels[j];
            }
        }
    }

    return rep;
}

// Basis of the space of maps intertwining both the action and the
// p-operator.  Unknown F is N.mdim x M.mdim, flattened row-major.
inline std::vector<Matrix> hom_beck(const BeckModule& M, const BeckModule& N) {
    if (!same_algebra(M.A, N.A)) throw AlgebraMismatch();
    const Fp& k = M.A.k;
    const std::size_t m = M.mdim, n = N.mdim;
    if (m == 0 || n == 0) return {};

    std::vector<std::pair<const Matrix*, const Matrix*>> pairs;
    for (std::size_t i = 1; i < M.A.dim; ++i) pairs.emplace_back(&M.action[i], &N.action[i]);
    pairs.emplace_back(&M.piM, &N.piM);

    std::vector<Vec> rows;
    rows.reserve(pairs.size() * n * m);
    for (auto [X, Y] : pairs)
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < m; ++c) {
                Vec row(n * m, 0);
                for (std::size_t b = 0; b < m; ++b) row[r * m + b] = k.add(row[r * m + b], X->at(b, c));
                for (std::size_t a = 0; a < n; ++a) row[a * m + c] = k.sub(row[a * m + c], Y->at(r, a));
                rows.push_back(std::move(row));
            }

    Subspace sol = kernel(Matrix::from_rows(k, n * m, rows));
    std::vector<Matrix> basis;
    basis.reserve(sol.dim());
    for (const Vec& v : sol.basis()) {
        Matrix F = Matrix::unflatten(k, n, m, v);
        for (auto [X, Y] : pairs)
            if (!(F.times(*X) == Y->times(F))) throw Error("hom solver output fails its own equations");
        basis.push_back(std::move(F));
    }
    return basis;
}

struct SquareZeroExtension {
    PDAlgebra ext;
    Matrix projection;  // onto the base algebra coordinates
};

// A + M with M squared to zero; the p-map seeds on base and module basis
// vectors encode P(a, m) = (pi(a), P(m) - a^{p-1} m): the only surviving
// sum-rule correction between (a,0) and (0,m) is the k = p-1 term.
inline SquareZeroExtension square_zero_extension(const PDAlgebra& base, const BeckModule& M) {
    if (!same_algebra(base.A, M.A)) throw AlgebraMismatch();
    Report chk = verify_beck_module(M);
    if (!chk.all_pass()) throw Error("square-zero extension over an invalid module");
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    const std::size_t d = A.dim, n = M.mdim;

    std::vector<std::string> labels = A.labels;
    for (std::size_t j = 0; j < n; ++j) labels.push_back("m:" + M.labels[j]);
    std::vector<std::uint32_t> plus = A.plus;
    for (std::size_t j = 0; j < n; ++j) plus.push_back(static_cast<std::uint32_t>(d + j));

    FiniteCommAlgebra E(k, std::move(labels), std::move(plus));
    for (std::size_t i = 1; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) E.set_product(i, j, A.row(i, j));
        for (std::size_t j = 0; j < n; ++j) {
            SparseRow r;
            for (std::size_t t = 0; t < n; ++t)
                if (M.action[i].at(t, j)) r.push_back(Term{static_cast<std::uint32_t>(d + t), M.action[i].at(t, j)});
            E.set_product(i, d + j, std::move(r));
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) E.set_product(d + i, d + j, {});

    PMap pi = PMap::zero(E);
    for (std::size_t t = 0; t < A.plus.size(); ++t) {
        const Vec& img = base.pi.images[t];
        for (std::size_t s = 0; s < d; ++s) pi.images[t][s] = img[s];
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t t = 0; t < n; ++t) pi.images[A.plus.size() + j][d + t] = M.piM.at(t, j);

    Matrix proj(k, d, d + n);
    for (std::size_t i = 0; i < d; ++i) proj.at(i, i) = 1;
    return SquareZeroExtension{PDAlgebra{std::move(E), std::move(pi)}, std::move(proj)};
}

// Algebra homomorphism checks for a matrix sigma: B -> A.
inline void require_pd_homomorphism(const PDAlgebra& from, const PDAlgebra& to, const Matrix& sigma) {
    const FiniteCommAlgebra& B = from.A;
    const FiniteCommAlgebra& A = to.A;
    if (sigma.rows() != A.dim || sigma.cols() != B.dim) throw DimensionMismatch("homomorphism matrix");
    if (B.k.modulus() != A.k.modulus()) throw AlgebraMismatch();
    if (A.dim == 0) return;  // everything collapses into the zero algebra
    if (!(sigma.apply(B.unit()) == A.unit())) throw NotHomomorphism("unit");
    for (std::size_t i = 0; i < B.dim; ++i)
        for (std::size_t j = i; j < B.dim; ++j) {
            Vec lhs = sigma.apply(B.multiply(B.basis_vec(i), B.basis_vec(j)));
            Vec rhs = A.multiply(sigma.apply(B.basis_vec(i)), sigma.apply(B.basis_vec(j)));
            if (lhs != rhs) throw NotHomomorphism("(" + B.labels[i] + ", " + B.labels[j] + ")");
        }
    for (std::uint32_t i : B.plus) {
        Vec img = sigma.apply(B.basis_vec(i));
        if (!A.in_plus_span(img)) throw NotHomomorphism("image of " + B.labels[i] + " leaves the ideal");
        Vec lhs = sigma.apply(eval_pmap(B, from.pi, B.basis_vec(i)));
        Vec rhs = eval_pmap(A, to.pi, img);
        if (lhs != rhs) throw NotHomomorphism("p-map at " + B.labels[i]);
    }
}

struct BaseChangedModule {
    BeckModule module;
    QuotientSpace coords;  // generator (t, j) sits at ambient index t*A.dim + j
};

// M tensored up along sigma: B -> A, as the free A-span of M-generators
// modulo bilinearity, with P(m ox a) = a^p (P m ox 1).  The p-operator is
// well defined because b^p = 0 on B_+ meets P rho(b) = 0, and the zero part
// is Frobenius-twisted on both sides.
inline BaseChangedModule base_change(const BeckModule& Mb, const PDAlgebra& from, const PDAlgebra& to,
                                     const Matrix& sigma) {
    if (!same_algebra(Mb.A, from.A)) throw AlgebraMismatch();
    require_pd_homomorphism(from, to, sigma);
    const FiniteCommAlgebra& B = from.A;
    const FiniteCommAlgebra& A = to.A;
    const Fp& k = A.k;
    const std::size_t n = Mb.mdim, d = A.dim;
    const std::size_t amb = n * d;

    std::vector<Vec> rels;
    for (std::size_t b = 1; b < B.dim; ++b) {
        Vec sb = sigma.apply(B.basis_vec(b));
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t j = 0; j < d; ++j) {
                Vec r(amb, 0);
                for (std::size_t s = 0; s < n; ++s)
                    if (Mb.action[b].at(s, t)) r[s * d + j] = k.add(r[s * d + j], Mb.action[b].at(s, t));
                Vec prod = A.multiply(sb, A.basis_vec(j));
                for (std::size_t l = 0; l < d; ++l)
                    if (prod[l]) r[t * d + l] = k.sub(r[t * d + l], prod[l]);
                if (!vec_is_zero(r)) rels.push_back(std::move(r));
            }
    }
    QuotientSpace Q = QuotientSpace::of_full_space(Subspace::span(k, amb, std::move(rels)));

    auto act_ambient = [&](std::size_t i, const Vec& v) {
        Vec out(amb, 0);
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t j = 0; j < d; ++j) {
                Scalar c = v[t * d + j];
                if (!c) continue;
                for (const Term& s : A.row(i, j)) out[t * d + s.idx] = k.add(out[t * d + s.idx], k.mul(c, s.c));
            }
        return out;
    };
    std::vector<Matrix> action;
    action.reserve(d);
    for (std::size_t i = 0; i < d; ++i)
        action.push_back(Q.induced_matrix([&](const Vec& v) { return act_ambient(i, v); }));

    std::vector<Vec> fpow;
    for (std::size_t j = 0; j < d; ++j) fpow.push_back(A.power(A.basis_vec(j), k.modulus()));
    Matrix piT = Q.induced_matrix([&](const Vec& v) {
        Vec out(amb, 0);
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t j = 0; j < d; ++j) {
                Scalar c = v[t * d + j];
                if (!c) continue;
                for (std::size_t s = 0; s < n; ++s) {
                    Scalar pc = Mb.piM.at(s, t);
                    if (!pc) continue;
                    for (std::size_t l = 0; l < d; ++l)
                        if (fpow[j][l]) out[s * d + l] = k.add(out[s * d + l], k.mul(k.mul(c, pc), fpow[j][l]));
                }
            }
        return out;
    });

    std::vector<std::string> labels;
    for (const Vec& r : Q.reps()) {
        std::size_t nz = 0;
        for (std::size_t a = 0; a < amb; ++a)
            if (r[a]) nz = a;
        labels.push_back(Mb.labels[nz / d] + "(x)" + A.labels[nz % d]);
    }

    BeckModule out{A, to.pi, Q.dim(), std::move(labels), std::move(action), std::move(piT)};
    return BaseChangedModule{std::move(out), std::move(Q)};
}

// N over A pulled back through sigma: B -> A.
inline BeckModule restrict_scalars(const BeckModule& N, const PDAlgebra& from, const PDAlgebra& to,
                                   const Matrix& sigma) {
    if (!same_algebra(N.A, to.A)) throw AlgebraMismatch();
    require_pd_homomorphism(from, to, sigma);
    const FiniteCommAlgebra& B = from.A;
    std::vector<Matrix> action;
    action.reserve(B.dim);
    for (std::size_t j = 0; j < B.dim; ++j) action.push_back(N.act(sigma.apply(B.basis_vec(j))));
    return BeckModule{B, from.pi, N.mdim, N.labels, std::move(action), N.piM};
}

struct LocalizedModule {
    LocalizedAlgebra loc;
    BeckModule Mf;        // torsion quotient, directly over A_f
    BeckModule tensored;  // M tensored up along the canonical map
    Matrix tau;           // Mf -> tensored
    bool tau_is_isomorphism;
};

// Builds the torsion-quotient localization and the tensor model
// independently, then compares them through m/1 -> m ox 1.
inline LocalizedModule localize_module(const PDAlgebra& base, const BeckModule& M, const Vec& f) {
    if (!same_algebra(base.A, M.A)) throw AlgebraMismatch();
    const Fp& k = base.A.k;
    LocalizedAlgebra loc = localize_algebra(base, f);

    if (loc.shape == LocalizedShape::Zero) {
        BeckModule zf = zero_module(loc.Af);
        BeckModule zt = zero_module(loc.Af);
        return LocalizedModule{std::move(loc), std::move(zf), std::move(zt), Matrix(k, 0, 0), true};
    }

    Subspace torsion = kernel(M.act(f).power(M.mdim ? M.mdim : 1));
    for (const Vec& t : torsion.basis())
        if (!torsion.member(M.piM.apply(t)))
            throw Error("p-operator does not preserve the torsion part");
    QuotientSpace Qm = QuotientSpace::of_full_space(torsion);

    const FiniteCommAlgebra& Af = loc.Af.A;
    std::vector<Matrix> action;
    action.reserve(Af.dim);
    for (std::size_t t = 0; t < Af.dim; ++t) {
        auto lift = solve(loc.canonical, Af.basis_vec(t));
        if (!lift) throw Error("canonical map is not surjective");
        action.push_back(Qm.induced_matrix([&](const Vec& v) { return M.act(*lift).apply(v); }));
    }
    Matrix piMf = Qm.induced_matrix([&](const Vec& v) { return M.piM.apply(v); });
    std::vector<std::string> labels;
    for (const Vec& r : Qm.reps()) labels.push_back(M.coord_string(r));
    BeckModule Mf{Af, loc.Af.pi, Qm.dim(), std::move(labels), std::move(action), std::move(piMf)};

    BaseChangedModule bc = base_change(M, base, loc.Af, loc.canonical);

    std::vector<Vec> cols;
    for (const Vec& r : Qm.reps()) {
        Vec amb(M.mdim * Af.dim, 0);
        for (std::size_t t = 0; t < M.mdim; ++t)
            if (r[t]) amb[t * Af.dim] = r[t];
        cols.push_back(bc.coords.coords(amb));
    }
    Matrix tau = Matrix::from_columns(k, bc.module.mdim, cols);

    bool iso = Mf.mdim == bc.module.mdim && rank(tau) == Mf.mdim;
    for (std::size_t i = 0; i < Af.dim && iso; ++i)
        if (!(tau.times(Mf.action[i]) == bc.module.action[i].times(tau))) iso = false;
    if (iso && !(tau.times(Mf.piM) == bc.module.piM.times(tau))) iso = false;

    return LocalizedModule{std::move(loc), std::move(Mf), std::move(bc.module), std::move(tau), iso};
}

struct SectionEnumeration {
    std::uint64_t count = 0;
    std::vector<Matrix> module_parts;  // mdim x dim; column j = module component of the section at e_j
};

// Exhaustive enumeration of algebra sections of A + M -> A: a section is
// determined by the module components at the ideal basis; survivors must be
// multiplicative and commute with the p-maps.
inline SectionEnumeration section_homs_bruteforce(const PDAlgebra& base, const BeckModule& M,
                                                  std::uint64_t cap = 729) {
    if (!same_algebra(base.A, M.A)) throw AlgebraMismatch();
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    const std::uint64_t p = k.modulus();
    if (A.zero_part_dim() != 1) throw CapExceeded("section enumeration needs a one-dimensional zero part");
    if (!checked_pow(p, M.mdim, cap)) throw CapExceeded("module has more than cap elements");
    const std::size_t digits = M.mdim * A.plus.size();
    if (!checked_pow(p, digits, 1u << 22)) throw CapExceeded("candidate space too large");

    SquareZeroExtension sz = square_zero_extension(base, M);
    const FiniteCommAlgebra& E = sz.ext.A;
    const std::size_t d = A.dim;

    auto embed = [&](std::size_t i, const std::vector<Scalar>& dig, int pos) {
        // section image of e_i: (e_i, D(e_i)) with D read off the digit block
        Vec v(E.dim, 0);
        v[i] = 1;
        if (pos >= 0)
            for (std::size_t t = 0; t < M.mdim; ++t) v[d + t] = dig[static_cast<std::size_t>(pos) * M.mdim + t];
        return v;
    };

    SectionEnumeration out;
    std::vector<Scalar> dig(digits, 0);
    while (true) {
        bool ok = true;
        // section as a linear map A -> E determined on the basis
        std::vector<Vec> simg(d);
        simg[0] = E.unit();
        for (std::size_t t = 0; t < A.plus.size(); ++t) simg[A.plus[t]] = embed(A.plus[t], dig, static_cast<int>(t));
        auto s_of = [&](const Vec& a) {
            Vec v(E.dim, 0);
            for (std::size_t i = 0; i < d; ++i)
                if (a[i]) vec_add_scaled(k, v, simg[i], a[i]);
            return v;
        };
        for (std::size_t i = 1; i < d && ok; ++i)
            for (std::size_t j = i; j < d; ++j) {
                Vec lhs = s_of(A.multiply(A.basis_vec(i), A.basis_vec(j)));
                Vec rhs = E.multiply(simg[i], simg[j]);
                if (lhs != rhs) {
                    ok = false;
                    break;
                }
            }
        for (std::size_t t = 0; t < A.plus.size() && ok; ++t) {
            Vec lhs = s_of(eval_pmap(A, base.pi, A.basis_vec(A.plus[t])));
            Vec rhs = eval_pmap(E, sz.ext.pi, simg[A.plus[t]]);
            if (lhs != rhs) ok = false;
        }
        if (ok) {
            ++out.count;
            Matrix D(k, M.mdim, d);
            for (std::size_t t = 0; t < A.plus.size(); ++t)
                for (std::size_t s = 0; s < M.mdim; ++s) D.at(s, A.plus[t]) = dig[t * M.mdim + s];
            out.module_parts.push_back(std::move(D));
        }
        std::size_t t = 0;
        for (; t < digits; ++t) {
            if (++dig[t] < p) break;
            dig[t] = 0;
        }
        if (t == digits) break;
    }
    return out;
}

}  // namespace dpw
