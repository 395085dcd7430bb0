#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dpw/derivations.hpp"

namespace dpw {

struct InconsistentPAction : Error {
    explicit InconsistentPAction(const std::string& w)
        : Error("p-operator does not descend to the presented module: " + w) {}
};

struct NotAugmented : Error {
    explicit NotAugmented(const std::string& where)
        : Error(where + ": zero part must be the unit line") {}
};

inline Vec mat_col(const Matrix& m, std::size_t j) {
    Vec v(m.rows(), 0);
    for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m.at(i, j);
    return v;
}

// I/I^2 for I = ker(mu: A ox A -> A), carrying the left action a.w = (a ox 1)w
// and the p-operator inherited from the tensor square.  Representatives stay
// inside T_+ because everything in I has zero coefficient on 1 ox 1.
struct KaehlerData {
    PDAlgebra base;
    TensorSquare tensor;
    Subspace I;
    Subspace I2;
    QuotientSpace Q;
    BeckModule module;
    Matrix d;  // column j = class of 1 ox e_j - e_j ox 1
};

inline KaehlerData kaehler_differentials(const PDAlgebra& base, std::size_t dim_cap = 4096) {
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    if (A.zero_part_dim() != 1) throw NotAugmented("kaehler_differentials");

    TensorSquare ts = tensor_square(base, dim_cap);
    Subspace I = kernel(ts.mu);
    Subspace I2 = product_span(I, I, [&](const Vec& a, const Vec& b) { return ts.T.multiply(a, b); });
    QuotientSpace Q(I2, I.basis());

    std::vector<Matrix> action;
    action.reserve(A.dim);
    for (std::size_t i = 0; i < A.dim; ++i) {
        Vec left = tensor_pure(A, A.basis_vec(i), A.unit());
        action.push_back(Q.induced_matrix([&](const Vec& r) { return ts.T.multiply(left, r); }));
    }
    Matrix piQ = Q.induced_matrix([&](const Vec& r) { return eval_pmap(ts.T, ts.pi, r); });

    std::vector<std::string> labels;
    labels.reserve(Q.dim());
    for (const Vec& r : Q.reps()) labels.push_back("[" + ts.T.to_string(r) + "]");

    std::vector<Vec> dcols;
    dcols.reserve(A.dim);
    for (std::size_t j = 0; j < A.dim; ++j) {
        Vec w = vec_sub(k, tensor_pure(A, A.unit(), A.basis_vec(j)),
                        tensor_pure(A, A.basis_vec(j), A.unit()));
        dcols.push_back(Q.coords(w));
    }
    Matrix d = Matrix::from_columns(k, Q.dim(), dcols);

    BeckModule module{A, base.pi, Q.dim(), std::move(labels), std::move(action), std::move(piQ)};
    return KaehlerData{base, std::move(ts), std::move(I), std::move(I2), std::move(Q),
                       std::move(module), std::move(d)};
}

inline Report verify_universal_derivation(const KaehlerData& K, VerifyOptions opts = {}) {
    const FiniteCommAlgebra& A = K.base.A;
    const Fp& k = A.k;
    Report rep;
    rep.command = "kaehler";
    rep.prime = k.modulus();
    rep.seed = opts.seed;

    PIdealCheck ci = is_p_ideal(K.tensor.T, K.tensor.pi, K.I);
    auto& c1 = rep.add("kernel-is-p-ideal", ci.ok(), {(std::int64_t)K.I.dim()});
    if (ci.witness) c1.witness = *ci.witness;
    PIdealCheck ci2 = is_p_ideal(K.tensor.T, K.tensor.pi, K.I2);
    auto& c2 = rep.add("kernel-square-is-p-ideal", ci2.ok(), {(std::int64_t)K.I2.dim()});
    if (ci2.witness) c2.witness = *ci2.witness;
    rep.add("kernel-contains-square", K.I.contains(K.I2));

    rep.absorb(verify_beck_module(K.module), "quotient-");

    rep.add("differential-kills-unit", vec_is_zero(mat_col(K.d, 0)));

    bool leib = true;
    std::string leib_w;
    for (std::size_t i = 0; i < A.dim && leib; ++i)
        for (std::size_t j = 0; j < A.dim && leib; ++j) {
            Vec lhs = K.d.apply(A.multiply(A.basis_vec(i), A.basis_vec(j)));
            Vec rhs = vec_add(k, K.module.action[i].apply(mat_col(K.d, j)),
                              K.module.action[j].apply(mat_col(K.d, i)));
            if (lhs != rhs) {
                leib = false;
                leib_w = "at (" + A.labels[i] + ", " + A.labels[j] + ")";
            }
        }
    auto& cl = rep.add("differential-leibniz", leib);
    if (!leib) cl.witness = leib_w;

    // d(pi(a)) = P d(a) - a^{p-1} d(a); not additive in a, so basis points
    // do not suffice.
    bool twist = true;
    std::string twist_w;
    std::int64_t twist_count = 0;
    auto probe = [&](const Vec& a) {
        if (!twist) return;
        Vec da = K.d.apply(a);
        Vec lhs = K.d.apply(eval_pmap(A, K.base.pi, a));
        Vec rhs = vec_sub(k, K.module.piM.apply(da),
                          K.module.act(A.power(a, k.modulus() - 1)).apply(da));
        ++twist_count;
        if (lhs != rhs) {
            twist = false;
            twist_w = "at " + A.to_string(a);
        }
    };
    if (checked_pow(k.modulus(), A.plus.size(), opts.cap)) {
        enumerate_span(A, A.plus, probe);
    } else {
        Rng rng(opts.seed ^ 0xd1f7ULL);
        for (std::size_t t = 0; t < opts.budget; ++t) probe(random_plus_element(A, rng));
    }
    auto& ct = rep.add("differential-twisted-identity", twist, {twist_count});
    if (!twist) ct.witness = twist_w;

    // Representative-independence of the inherited p-operator.
    bool cosets = true;
    std::string coset_w;
    {
        Rng rng(opts.seed ^ 0xc05e75ULL);
        const std::vector<Vec>& ib = K.I.basis();
        const std::vector<Vec>& sb = K.I2.basis();
        for (std::size_t t = 0; t < opts.budget && cosets && !sb.empty(); ++t) {
            Vec w(K.tensor.T.dim, 0);
            for (const Vec& b : ib) vec_add_scaled(k, w, b, rng.below(k.modulus()));
            Vec shifted = w;
            for (const Vec& b : sb) vec_add_scaled(k, shifted, b, rng.below(k.modulus()));
            Vec qa = K.Q.coords(eval_pmap(K.tensor.T, K.tensor.pi, w));
            Vec qb = K.Q.coords(eval_pmap(K.tensor.T, K.tensor.pi, shifted));
            if (qa != qb) {
                cosets = false;
                coset_w = "shift changes p-image at " + K.tensor.T.to_string(w);
            }
        }
    }
    auto& cc = rep.add("p-operator-respects-cosets", cosets, {(std::int64_t)opts.budget});
    if (!cosets) cc.witness = coset_w;

    // (a ox 1)w and (1 ox a)w agree mod I^2, so the one-sided action is the
    // canonical one.
    bool sides = true;
    std::string side_w;
    for (std::size_t i = 1; i < A.dim && sides; ++i) {
        Vec left = tensor_pure(A, A.basis_vec(i), A.unit());
        Vec right = tensor_pure(A, A.unit(), A.basis_vec(i));
        for (const Vec& r : K.Q.reps()) {
            Vec diff = vec_sub(k, K.tensor.T.multiply(left, r), K.tensor.T.multiply(right, r));
            if (!K.I2.member(diff)) {
                sides = false;
                side_w = "at " + A.labels[i];
                break;
            }
        }
    }
    auto& cs = rep.add("action-side-collapse", sides);
    if (!sides) cs.witness = side_w;

    return rep;
}

// x^{p-n} ox x^n = n x^{p-1} ox x  mod I^2, for all x in A_+ and 1 <= n <= p.
inline Report check_power_split_congruence(const PDAlgebra& base, VerifyOptions opts = {}) {
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    const std::uint64_t p = k.modulus();
    KaehlerData K = kaehler_differentials(base);

    Report rep;
    rep.command = "powersplit";
    rep.prime = p;
    rep.seed = opts.seed;

    for (std::uint64_t n = 1; n <= p; ++n) {
        bool pass = true;
        std::string w;
        std::int64_t count = 0;
        auto probe = [&](const Vec& x) {
            if (!pass) return;
            Vec lhs = tensor_pure(A, A.power(x, p - n), A.power(x, n));
            Vec rhs = vec_scale(k, tensor_pure(A, A.power(x, p - 1), x), k.reduce_int((long long)n));
            ++count;
            if (!K.I2.member(vec_sub(k, lhs, rhs))) {
                pass = false;
                w = "at x = " + A.to_string(x);
            }
        };
        if (checked_pow(p, A.plus.size(), opts.cap)) {
            enumerate_span(A, A.plus, probe);
        } else {
            Rng rng(opts.seed ^ (0x9b1e5ULL + n));
            for (std::size_t t = 0; t < opts.budget; ++t) probe(random_plus_element(A, rng));
        }
        auto& c = rep.add("power-split-n" + std::to_string(n), pass, {count});
        if (!pass) c.witness = w;
    }
    return rep;
}

// Free A-module on symbols de_i modulo d(1) = 0 and the A-saturation of the
// Leibniz relators d(e_i e_j) - e_i de_j - e_j de_i, with
// P(de_i) = [d(pi(e_i)) + e_i^{p-1} de_i] and P(e_t de_i) = 0 for t >= 1.
struct PresentedOmega {
    PDAlgebra base;
    QuotientSpace coords;  // symbol e_t de_i sits at ambient index t*dim + i
    BeckModule module;
    Matrix gens;  // column i = class of de_i
};

inline PresentedOmega omega_p_presentation(const PDAlgebra& base) {
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    if (A.zero_part_dim() != 1) throw NotAugmented("omega_p_presentation");
    const std::size_t d = A.dim;
    const std::size_t amb = d * d;

    auto lin_d = [&](const Vec& v) {
        Vec out(amb, 0);
        for (std::size_t t = 0; t < d; ++t) out[t] = v[t];
        return out;
    };

    std::vector<Vec> rels;
    for (std::size_t t = 0; t < d; ++t) {
        Vec r(amb, 0);
        r[t * d] = 1;
        rels.push_back(std::move(r));
    }
    for (std::size_t i = 1; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            Vec r = lin_d(A.multiply(A.basis_vec(i), A.basis_vec(j)));
            r[i * d + j] = k.sub(r[i * d + j], 1);
            r[j * d + i] = k.sub(r[j * d + i], 1);
            if (!vec_is_zero(r)) rels.push_back(std::move(r));
        }

    auto act_ambient = [&](std::size_t s, const Vec& v) {
        Vec out(amb, 0);
        for (std::size_t t = 0; t < d; ++t)
            for (std::size_t i = 0; i < d; ++i) {
                Scalar c = v[t * d + i];
                if (!c) continue;
                for (const Term& term : A.row(s, t))
                    out[term.idx * d + i] = k.add(out[term.idx * d + i], k.mul(c, term.c));
            }
        return out;
    };

    Subspace R = Subspace::span(k, amb, rels);
    for (bool grew = true; grew;) {
        grew = false;
        std::vector<Vec> gens = R.basis();
        for (std::size_t s = 1; s < d; ++s)
            for (const Vec& v : R.basis()) {
                Vec w = act_ambient(s, v);
                if (!R.member(w)) {
                    gens.push_back(std::move(w));
                    grew = true;
                }
            }
        if (grew) R = Subspace::span(k, amb, std::move(gens));
    }

    auto p_ambient = [&](const Vec& v) {
        Vec out(amb, 0);
        for (std::size_t i = 1; i < d; ++i) {
            Scalar c = v[i];
            if (!c) continue;
            Vec w = lin_d(eval_pmap(A, base.pi, A.basis_vec(i)));
            Vec pow = A.power(A.basis_vec(i), k.modulus() - 1);
            for (std::size_t u = 0; u < d; ++u)
                if (pow[u]) w[u * d + i] = k.add(w[u * d + i], pow[u]);
            vec_add_scaled(k, out, w, c);
        }
        return out;
    };
    for (const Vec& z : R.basis())
        if (!R.member(p_ambient(z)))
            throw InconsistentPAction("relation escapes under P");

    QuotientSpace Q = QuotientSpace::of_full_space(R);

    std::vector<Matrix> action;
    action.reserve(d);
    for (std::size_t s = 0; s < d; ++s)
        action.push_back(Q.induced_matrix([&](const Vec& v) { return act_ambient(s, v); }));
    Matrix piO = Q.induced_matrix(p_ambient);

    auto symbol_string = [&](const Vec& v) {
        std::string out;
        for (std::size_t t = 0; t < d; ++t)
            for (std::size_t i = 0; i < d; ++i) {
                Scalar c = v[t * d + i];
                if (!c) continue;
                if (!out.empty()) out += " + ";
                if (c != 1) out += std::to_string(c) + "*";
                if (t) out += A.labels[t] + "*";
                out += "d(" + A.labels[i] + ")";
            }
        return out.empty() ? "0" : out;
    };
    std::vector<std::string> labels;
    labels.reserve(Q.dim());
    for (const Vec& r : Q.reps()) labels.push_back("[" + symbol_string(r) + "]");

    std::vector<Vec> gcols;
    gcols.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        Vec u(amb, 0);
        u[i] = 1;
        gcols.push_back(Q.coords(u));
    }
    Matrix gens = Matrix::from_columns(k, Q.dim(), gcols);

    BeckModule module{A, base.pi, Q.dim(), std::move(labels), std::move(action), std::move(piO)};
    return PresentedOmega{base, std::move(Q), std::move(module), std::move(gens)};
}

struct OmegaComparison {
    PresentedOmega omega;
    KaehlerData kaehler;
    Matrix map;  // presented coordinates -> quotient coordinates, de_i -> d(e_i)
    Report report;
};

inline OmegaComparison verify_omega_iso(const PDAlgebra& base, VerifyOptions opts = {}) {
    PresentedOmega O = omega_p_presentation(base);
    KaehlerData K = kaehler_differentials(base);
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    const std::size_t d = A.dim;

    auto image = [&](const Vec& w) {
        Vec out(K.module.mdim, 0);
        for (std::size_t t = 0; t < d; ++t)
            for (std::size_t i = 0; i < d; ++i) {
                Scalar c = w[t * d + i];
                if (!c) continue;
                vec_add_scaled(k, out, K.module.action[t].apply(mat_col(K.d, i)), c);
            }
        return out;
    };
    std::vector<Vec> cols;
    cols.reserve(O.coords.dim());
    for (const Vec& r : O.coords.reps()) cols.push_back(image(r));
    Matrix C = Matrix::from_columns(k, K.module.mdim, cols);

    Report rep;
    rep.command = "omega";
    rep.prime = k.modulus();
    rep.seed = opts.seed;
    rep.absorb(verify_beck_module(O.module), "presented-");
    rep.absorb(verify_beck_module(K.module), "quotient-");

    bool acts = true;
    std::string act_w;
    for (std::size_t s = 0; s < d; ++s)
        if (!(C.times(O.module.action[s]) == K.module.action[s].times(C))) {
            acts = false;
            act_w = "at " + A.labels[s];
            break;
        }
    auto& ca = rep.add("comparison-intertwines-action", acts);
    if (!acts) ca.witness = act_w;
    rep.add("comparison-intertwines-p-operator", C.times(O.module.piM) == K.module.piM.times(C));
    std::size_t rk = rank(C);
    rep.add("comparison-bijective", rk == O.module.mdim && rk == K.module.mdim,
            {(std::int64_t)O.module.mdim, (std::int64_t)K.module.mdim, (std::int64_t)rk});
    rep.add("generators-map-to-differentials", C.times(O.gens) == K.d);

    return OmegaComparison{std::move(O), std::move(K), std::move(C), std::move(rep)};
}

// Hom_{V(A)}(I/I^2, M) versus twisted derivations A -> M, both directions:
// f |-> f.d pulls back, and D |-> (a ox b |-> a D(b)) descends through I^2.
struct RepresentabilityData {
    KaehlerData kaehler;
    std::vector<Matrix> homs;
    DerivationSolve ders;
    Report report;
};

inline RepresentabilityData representability(const PDAlgebra& base, const BeckModule& M,
                                             VerifyOptions opts = {}) {
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    const std::size_t d = A.dim;
    KaehlerData K = kaehler_differentials(base);
    std::vector<Matrix> homs = hom_beck(K.module, M);
    DerivationSolve ders = beck_derivations(base, M, opts);

    auto backward = [&](const Matrix& f) { return f.times(K.d); };
    auto phi_ambient = [&](const Matrix& D, const Vec& w) {
        Vec out(M.mdim, 0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                Scalar c = w[i * d + j];
                if (!c) continue;
                vec_add_scaled(k, out, M.action[i].apply(mat_col(D, j)), c);
            }
        return out;
    };
    auto forward = [&](const Matrix& D) {
        std::vector<Vec> cols;
        cols.reserve(K.Q.dim());
        for (const Vec& r : K.Q.reps()) cols.push_back(phi_ambient(D, r));
        return Matrix::from_columns(k, M.mdim, cols);
    };

    Report rep;
    rep.command = "representability";
    rep.prime = k.modulus();
    rep.seed = opts.seed;

    rep.add("derivation-space-dims", homs.size() == ders.basis.size(),
            {(std::int64_t)homs.size(), (std::int64_t)ders.basis.size()});

    bool kills = true;
    std::string kill_w;
    for (const Matrix& D : ders.basis) {
        for (const Vec& z : K.I2.basis())
            if (!vec_is_zero(phi_ambient(D, z))) {
                kills = false;
                kill_w = "I^2 element survives: " + K.tensor.T.to_string(z);
                break;
            }
        if (!kills) break;
    }
    auto& ck = rep.add("induced-map-kills-relations", kills);
    if (!kills) ck.witness = kill_w;

    std::vector<Vec> hom_flat, der_flat;
    for (const Matrix& f : homs) {
        Vec v;
        for (std::size_t i = 0; i < f.rows(); ++i)
            for (std::size_t j = 0; j < f.cols(); ++j) v.push_back(f.at(i, j));
        hom_flat.push_back(std::move(v));
    }
    for (const Matrix& D : ders.basis) {
        Vec v;
        for (std::size_t i = 0; i < D.rows(); ++i)
            for (std::size_t j = 0; j < D.cols(); ++j) v.push_back(D.at(i, j));
        der_flat.push_back(std::move(v));
    }
    Subspace hom_span = Subspace::span(k, M.mdim * K.module.mdim, hom_flat);
    Subspace der_span = Subspace::span(k, M.mdim * d, der_flat);
    auto flat = [&](const Matrix& m) {
        Vec v;
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) v.push_back(m.at(i, j));
        return v;
    };

    bool pullback = true;
    for (const Matrix& f : homs)
        if (!der_span.member(flat(backward(f)))) {
            pullback = false;
            break;
        }
    rep.add("pullbacks-are-derivations", pullback);

    bool pushforward = true;
    for (const Matrix& D : ders.basis)
        if (!hom_span.member(flat(forward(D)))) {
            pushforward = false;
            break;
        }
    rep.add("pushforwards-are-module-maps", pushforward);

    bool rt_der = true;
    for (const Matrix& D : ders.basis)
        if (!(backward(forward(D)) == D)) {
            rt_der = false;
            break;
        }
    rep.add("derivation-round-trip", rt_der);

    bool rt_hom = true;
    for (const Matrix& f : homs)
        if (!(forward(backward(f)) == f)) {
            rt_hom = false;
            break;
        }
    rep.add("hom-round-trip", rt_hom);

    return RepresentabilityData{std::move(K), std::move(homs), std::move(ders), std::move(rep)};
}

// J/J^2 -> Omega_A ox_A A/J -> Omega_{A/J} -> 0 for a p-ideal J, all three
// as modules over A/J.
struct SequenceData {
    QuotientAlgebra quo;
    PDAlgebra quotient;
    BeckModule conormal;
    PresentedOmega source;
    BaseChangedModule middle;
    PresentedOmega target;
    Matrix phi;
    Matrix psi;
    Report report;
};

inline SequenceData second_fundamental_sequence(const PDAlgebra& base, const Subspace& J,
                                                VerifyOptions opts = {}) {
    const FiniteCommAlgebra& A = base.A;
    const Fp& k = A.k;
    QuotientAlgebra quo = quotient_algebra(A, base.pi, J);
    PDAlgebra Bpd{quo.alg, quo.pi};
    const FiniteCommAlgebra& B = Bpd.A;

    Subspace J2 = product_span(J, J, [&](const Vec& a, const Vec& b) { return A.multiply(a, b); });
    QuotientSpace QJ(J2, J.basis());

    std::vector<Matrix> jact;
    jact.reserve(B.dim);
    for (std::size_t t = 0; t < B.dim; ++t) {
        Vec lift = A.basis_vec(quo.rep_indices[t]);
        jact.push_back(QJ.induced_matrix([&](const Vec& r) { return A.multiply(lift, r); }));
    }
    Matrix piJ = QJ.induced_matrix([&](const Vec& r) { return eval_pmap(A, base.pi, r); });
    std::vector<std::string> jlabels;
    jlabels.reserve(QJ.dim());
    for (const Vec& r : QJ.reps()) jlabels.push_back("[" + A.to_string(r) + "]");
    BeckModule conormal{B, quo.pi, QJ.dim(), std::move(jlabels), std::move(jact), std::move(piJ)};

    PresentedOmega OA = omega_p_presentation(base);
    PresentedOmega OB = omega_p_presentation(Bpd);
    BaseChangedModule middle = base_change(OA.module, base, Bpd, quo.projection);

    std::vector<Vec> pcols;
    pcols.reserve(QJ.dim());
    for (const Vec& r : QJ.reps()) {
        Vec w = OA.gens.apply(r);
        Vec amb(OA.module.mdim * B.dim, 0);
        for (std::size_t s = 0; s < OA.module.mdim; ++s) amb[s * B.dim] = w[s];
        pcols.push_back(middle.coords.coords(amb));
    }
    Matrix phi = Matrix::from_columns(k, middle.module.mdim, pcols);

    // e_t de_i in the A-presentation maps to proj(e_t) . d_B(proj(e_i)).
    std::vector<Vec> psi0;
    psi0.reserve(OA.module.mdim);
    for (const Vec& r : OA.coords.reps()) {
        Vec out(OB.module.mdim, 0);
        for (std::size_t t = 0; t < A.dim; ++t)
            for (std::size_t i = 0; i < A.dim; ++i) {
                Scalar c = r[t * A.dim + i];
                if (!c) continue;
                Vec db = OB.gens.apply(mat_col(quo.projection, i));
                vec_add_scaled(k, out, OB.module.act(mat_col(quo.projection, t)).apply(db), c);
            }
        psi0.push_back(std::move(out));
    }
    std::vector<Vec> scols;
    scols.reserve(middle.module.mdim);
    for (const Vec& r : middle.coords.reps()) {
        Vec out(OB.module.mdim, 0);
        for (std::size_t s = 0; s < OA.module.mdim; ++s)
            for (std::size_t j = 0; j < B.dim; ++j) {
                Scalar c = r[s * B.dim + j];
                if (!c) continue;
                vec_add_scaled(k, out, OB.module.action[j].apply(psi0[s]), c);
            }
        scols.push_back(std::move(out));
    }
    Matrix psi = Matrix::from_columns(k, OB.module.mdim, scols);

    Report rep;
    rep.command = "sequence";
    rep.prime = k.modulus();
    rep.seed = opts.seed;
    rep.absorb(verify_beck_module(conormal), "conormal-");

    auto intertwines = [&](const Matrix& F, const BeckModule& src, const BeckModule& dst,
                           std::string& w) {
        for (std::size_t t = 0; t < B.dim; ++t)
            if (!(F.times(src.action[t]) == dst.action[t].times(F))) {
                w = "action at " + B.labels[t];
                return false;
            }
        if (!(F.times(src.piM) == dst.piM.times(F))) {
            w = "p-operator";
            return false;
        }
        return true;
    };
    std::string w1, w2;
    bool i1 = intertwines(phi, conormal, middle.module, w1);
    auto& cj = rep.add("conormal-map-intertwines", i1);
    if (!i1) cj.witness = w1;
    bool i2 = intertwines(psi, middle.module, OB.module, w2);
    auto& cp = rep.add("projection-map-intertwines", i2);
    if (!i2) cp.witness = w2;

    rep.add("composite-vanishes", psi.times(phi).is_zero());

    std::vector<Vec> phicols;
    for (std::size_t j = 0; j < phi.cols(); ++j) phicols.push_back(mat_col(phi, j));
    Subspace image = Subspace::span(k, middle.module.mdim, phicols);
    Subspace ker = kernel(psi);
    rep.add("exact-at-middle", image.contains(ker) && ker.contains(image),
            {(std::int64_t)image.dim(), (std::int64_t)ker.dim()});
    rep.add("projection-surjective", rank(psi) == OB.module.mdim,
            {(std::int64_t)rank(psi), (std::int64_t)OB.module.mdim});
    rep.add("sequence-dims", true,
            {(std::int64_t)conormal.mdim, (std::int64_t)middle.module.mdim,
             (std::int64_t)OB.module.mdim});

    return SequenceData{std::move(quo),    std::move(Bpd),    std::move(conormal),
                        std::move(OA),     std::move(middle), std::move(OB),
                        std::move(phi),    std::move(psi),    std::move(rep)};
}

}  // namespace dpw
