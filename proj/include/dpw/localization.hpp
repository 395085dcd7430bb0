#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dpw/kaehler.hpp"

namespace dpw {

struct ZeroLocalization : Error {
    explicit ZeroLocalization(const std::string& w)
        : Error("localization vanishes: " + w) {}
};

inline std::string degeneracy_name(LocalizedShape s) {
    switch (s) {
        case LocalizedShape::Isomorphic: return "unit";
        case LocalizedShape::Zero: return "nilpotent";
        default: return "proper";
    }
}

// Torsion-quotient localization against the tensor model, with the comparison
// map m/1 |-> m ox 1 required to be an isomorphism of modules over A_f.
inline Report verify_localization_iso(const PDAlgebra& base, const BeckModule& M, const Vec& f,
                                      VerifyOptions opts = {}) {
    LocalizedModule L = localize_module(base, M, f);
    Report rep;
    rep.command = "localize";
    rep.prime = base.A.k.modulus();
    rep.seed = opts.seed;

    rep.add("degeneracy-class", true).note = degeneracy_name(L.loc.shape);
    if (L.loc.shape != LocalizedShape::Zero) {
        rep.absorb(verify_beck_module(L.Mf), "localized-");
        rep.absorb(verify_beck_module(L.tensored), "tensor-");
    }
    rep.add("model-dims", L.Mf.mdim == L.tensored.mdim,
            {(std::int64_t)L.Mf.mdim, (std::int64_t)L.tensored.mdim});
    rep.add("comparison-is-isomorphism", L.tau_is_isomorphism,
            {(std::int64_t)rank(L.tau)});
    return rep;
}

// d on A_f obeys d(a/f^i) = (1/f^i) d(a) - (1/f^{2i}) a d(f^i), checked on
// every basis fraction; the universal-derivation battery runs on A_f itself.
inline Report localized_universal_derivation(const PDAlgebra& base, const Vec& f,
                                             VerifyOptions opts = {}) {
    LocalizedAlgebra L = localize_algebra(base, f);
    if (L.shape == LocalizedShape::Zero)
        throw ZeroLocalization("f is nilpotent: " + base.A.to_string(f));
    const FiniteCommAlgebra& Af = L.Af.A;
    const Fp& k = Af.k;

    KaehlerData K = kaehler_differentials(L.Af);
    Report rep = verify_universal_derivation(K, opts);
    rep.command = "localize";
    rep.checks.front().note = degeneracy_name(L.shape);

    Vec fbar = L.canonical.apply(f);
    bool rule = true;
    std::string w;
    std::int64_t count = 0;
    for (std::size_t j = 0; j < Af.dim && rule; ++j) {
        Vec a = Af.basis_vec(j);
        for (std::uint64_t i = 1; i <= 2 && rule; ++i) {
            Vec fi = Af.power(fbar, i);
            Vec gi = Af.power(L.inverse_of_f, i);
            Vec lhs = K.d.apply(Af.multiply(a, gi));
            Vec rhs = vec_sub(k, K.module.act(gi).apply(K.d.apply(a)),
                              K.module.act(Af.multiply(gi, gi))
                                  .apply(K.module.act(a).apply(K.d.apply(fi))));
            ++count;
            if (lhs != rhs) {
                rule = false;
                w = "at " + Af.labels[j] + " / f^" + std::to_string(i);
            }
        }
    }
    auto& c = rep.add("fraction-differential-rule", rule, {count});
    if (!rule) c.witness = w;
    return rep;
}

}  // namespace dpw
