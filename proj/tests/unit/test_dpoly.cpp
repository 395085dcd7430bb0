#include <catch2/catch_amalgamated.hpp>

#include "dpw/dpoly.hpp"

using namespace dpw;

namespace {

DPPoly mono(const Fp& k, std::size_t n, std::initializer_list<std::uint32_t> exps, Scalar c) {
    return DPPoly::monomial(k, n, DPMonomial(exps), c);
}

}  // namespace

TEST_CASE("divided-power products follow the per-variable binomials") {
    Fp k(3);

    SECTION("x * x = 2 x^(2)") {
        DPPoly x = DPPoly::gamma_var(k, 1, 0, 1);
        REQUIRE(dp_multiply(x, x) == mono(k, 1, {2}, 2));
    }

    SECTION("x^(2) * x = 0 at p = 3") {
        DPPoly a = DPPoly::gamma_var(k, 1, 0, 2);
        DPPoly b = DPPoly::gamma_var(k, 1, 0, 1);
        REQUIRE(dp_multiply(a, b).is_zero());
    }

    SECTION("x1 x2 * x1 = 2 x1^(2) x2") {
        DPPoly u = mono(k, 2, {1, 1}, 1);
        DPPoly v = mono(k, 2, {1, 0}, 1);
        REQUIRE(dp_multiply(u, v) == mono(k, 2, {2, 1}, 2));
    }

    SECTION("associative and commutative on random triples") {
        for (std::uint64_t p : {2ull, 3ull, 5ull}) {
            Fp f(p);
            Rng rng(1000 + p);
            for (int trial = 0; trial < 40; ++trial) {
                std::size_t n = 1 + rng.below(3);
                DPLimits lim{8, 64};
                DPPoly a = random_dp_poly(f, n, rng, false, lim);
                DPPoly b = random_dp_poly(f, n, rng, false, lim);
                DPPoly c = random_dp_poly(f, n, rng, false, lim);
                REQUIRE(dp_multiply(a, b) == dp_multiply(b, a));
                REQUIRE(dp_multiply(dp_multiply(a, b), c) == dp_multiply(a, dp_multiply(b, c)));
            }
        }
    }

    SECTION("p-th powers of ideal elements vanish exactly") {
        for (std::uint64_t p : {2ull, 3ull, 5ull}) {
            Fp f(p);
            Rng rng(2000 + p);
            for (int trial = 0; trial < 30; ++trial) {
                std::size_t n = 1 + rng.below(3);
                DPPoly a = random_dp_poly(f, n, rng, true, DPLimits{8, 64});
                REQUIRE(dp_power(a, p).is_zero());
            }
        }
    }
}

TEST_CASE("partials lower one exponent") {
    Fp k(3);
    DPPoly u = mono(k, 2, {2, 1}, 1);
    REQUIRE(dp_d(u, 0) == mono(k, 2, {1, 1}, 1));
    REQUIRE(dp_d(mono(k, 2, {0, 5}, 1), 0).is_zero());
    REQUIRE(dp_d(DPPoly::unit(k, 2), 0).is_zero());

    SECTION("Leibniz for the partial against the product") {
        Rng rng(77);
        Fp f(3);
        for (int trial = 0; trial < 40; ++trial) {
            DPPoly a = random_dp_poly(f, 2, rng, false, DPLimits{6, 64});
            DPPoly b = random_dp_poly(f, 2, rng, false, DPLimits{6, 64});
            DPPoly lhs = dp_d(dp_multiply(a, b), 0);
            DPPoly rhs = dp_add(dp_multiply(dp_d(a, 0), b), dp_multiply(a, dp_d(b, 0)));
            REQUIRE(lhs == rhs);
        }
    }
}

TEST_CASE("sparse p-map seeds and folds") {
    Fp k(3);

    SECTION("pi(x) = x^(3)") {
        REQUIRE(dp_pmap(DPPoly::gamma_var(k, 1, 0, 1)) == DPPoly::gamma_var(k, 1, 0, 3));
    }

    SECTION("pi(x^(2)) = 0: composite coefficient vanishes off p-powers") {
        REQUIRE(dp_pmap(DPPoly::gamma_var(k, 1, 0, 2)).is_zero());
    }

    SECTION("pi(x^(3)) = x^(9)") {
        REQUIRE(dp_pmap(DPPoly::gamma_var(k, 1, 0, 3)) == DPPoly::gamma_var(k, 1, 0, 9));
    }

    SECTION("pi(x + x^(2)) = x^(3): corrections collapse") {
        DPPoly u = dp_add(DPPoly::gamma_var(k, 1, 0, 1), DPPoly::gamma_var(k, 1, 0, 2));
        REQUIRE(dp_pmap(u) == DPPoly::gamma_var(k, 1, 0, 3));
    }

    SECTION("constant terms are rejected") {
        REQUIRE_THROWS_AS(dp_pmap(DPPoly::unit(k, 1)), NonzeroConstantTerm);
        REQUIRE_THROWS_AS(dp_gamma(DPPoly::unit(k, 1), 2), NonzeroConstantTerm);
    }

    SECTION("sum rule holds against the explicit correction") {
        for (std::uint64_t p : {2ull, 3ull, 5ull}) {
            Fp f(p);
            Rng rng(3000 + p);
            for (int trial = 0; trial < 25; ++trial) {
                std::size_t n = 1 + rng.below(2);
                DPPoly a = random_dp_poly(f, n, rng, true, DPLimits{6, 64});
                DPPoly b = random_dp_poly(f, n, rng, true, DPLimits{6, 64});
                DPPoly lhs = dp_pmap(dp_add(a, b));
                DPPoly rhs = dp_add(dp_add(dp_pmap(a), dp_pmap(b)), dp_correction(a, b));
                REQUIRE(lhs == rhs);
            }
        }
    }

    SECTION("three-way splits agree regardless of grouping") {
        Fp f(3);
        Rng rng(31);
        for (int trial = 0; trial < 25; ++trial) {
            DPPoly a = random_dp_poly(f, 2, rng, true, DPLimits{5, 64});
            DPPoly b = random_dp_poly(f, 2, rng, true, DPLimits{5, 64});
            DPPoly c = random_dp_poly(f, 2, rng, true, DPLimits{5, 64});
            DPPoly direct = dp_pmap(dp_add(dp_add(a, b), c));
            // fold (a+b) first, then c
            DPPoly ab = dp_add(a, b);
            DPPoly left = dp_add(dp_add(dp_pmap(ab), dp_pmap(c)), dp_correction(ab, c));
            // fold (b+c) first, then a
            DPPoly bc = dp_add(b, c);
            DPPoly right = dp_add(dp_add(dp_pmap(a), dp_pmap(bc)), dp_correction(a, bc));
            REQUIRE(direct == left);
            REQUIRE(direct == right);
        }
    }
}

TEST_CASE("gamma reconstruction on the sparse model") {
    Fp k(3);
    DPPoly x = DPPoly::gamma_var(k, 1, 0, 1);

    SECTION("gamma_n(x) = x^(n) for single variables") {
        for (std::uint32_t nn = 1; nn <= 9; ++nn) REQUIRE(dp_gamma(x, nn) == DPPoly::gamma_var(k, 1, 0, nn));
    }

    SECTION("gamma_{p-1} is minus the (p-1)-st power") {
        for (std::uint64_t p : {2ull, 3ull, 5ull}) {
            Fp f(p);
            Rng rng(4000 + p);
            for (int trial = 0; trial < 20; ++trial) {
                DPPoly a = random_dp_poly(f, 2, rng, true, DPLimits{5, 64});
                REQUIRE(dp_gamma(a, p - 1) == dp_scale(dp_power(a, p - 1), p - 1));
            }
        }
    }

    SECTION("gamma_i gamma_j multiply by the binomial") {
        Rng rng(55);
        for (int trial = 0; trial < 15; ++trial) {
            DPPoly a = random_dp_poly(Fp(3), 2, rng, true, DPLimits{4, 64});
            for (std::uint32_t i = 1; i <= 3; ++i)
                for (std::uint32_t j = 1; j <= 3; ++j) {
                    DPPoly lhs = dp_multiply(dp_gamma(a, i), dp_gamma(a, j));
                    DPPoly rhs = dp_scale(dp_gamma(a, i + j), binom_mod_p(Fp(3), i + j, i));
                    REQUIRE(lhs == rhs);
                }
        }
    }
}

TEST_CASE("special vector fields satisfy the twisted identity") {
    Fp k(3);

    SECTION("d1 at a = x1: both sides are x1^(2)") {
        SpecialVectorField d1 = dp_basis_field(k, 1, 0);
        DPPoly x = DPPoly::gamma_var(k, 1, 0, 1);
        DPPoly lhs = d1.apply(dp_pmap(x));
        REQUIRE(lhs == DPPoly::gamma_var(k, 1, 0, 2));
        BeckIdentityCheck chk = check_beck_identity(d1, x);
        REQUIRE(chk.ok);
    }

    SECTION("d1 at a = x2: zero on both sides") {
        SpecialVectorField d1 = dp_basis_field(k, 2, 0);
        REQUIRE(check_beck_identity(d1, DPPoly::gamma_var(k, 2, 1, 1)).ok);
    }

    SECTION("a redefined action fails with a witness") {
        // the identity map is linear but no derivation: at a = x the left
        // side is x^(3) while x^(2) * x = C(3,1) x^(3) = 0
        auto not_a_derivation = [](const DPPoly& u) { return u; };
        BeckIdentityCheck chk = check_beck_identity_with(not_a_derivation, DPPoly::gamma_var(k, 1, 0, 1));
        REQUIRE_FALSE(chk.ok);
        REQUIRE_FALSE(chk.witness.empty());
    }

    SECTION("property battery: random fields pass on random ideal elements") {
        std::size_t failures = 0;
        for (std::uint64_t p : {2ull, 3ull, 5ull}) {
            Fp f(p);
            Rng rng(5000 + p);
            int fields = p == 5 ? 40 : 100;  // 240 fields, 10 probes each
            for (int field_trial = 0; field_trial < fields; ++field_trial) {
                std::size_t n = 1 + rng.below(2);
                SpecialVectorField D = random_special_field(f, n, rng, DPLimits{4, 64});
                for (int a_trial = 0; a_trial < 10; ++a_trial) {
                    DPPoly a = random_dp_poly(f, n, rng, true, DPLimits{3, 64});
                    if (!check_beck_identity(D, a).ok) ++failures;
                }
            }
        }
        REQUIRE(failures == 0);
    }
}

TEST_CASE("witt brackets") {
    Fp k(3);

    SECTION("constant fields commute") {
        SpecialVectorField d1 = dp_basis_field(k, 2, 0);
        SpecialVectorField d2 = dp_basis_field(k, 2, 1);
        SpecialVectorField br = witt_bracket(d1, d2);
        for (const DPPoly& c : br.components) REQUIRE(c.is_zero());
    }

    SECTION("[x1 d1, d1] = -d1") {
        SpecialVectorField xd1{{DPPoly::gamma_var(k, 1, 0, 1)}};
        SpecialVectorField d1 = dp_basis_field(k, 1, 0);
        SpecialVectorField br = witt_bracket(xd1, d1);
        REQUIRE(br.components[0] == dp_scale(DPPoly::unit(k, 1), 2));  // -1 = 2
    }

    SECTION("brackets of special fields stay special") {
        Rng rng(91);
        for (int trial = 0; trial < 20; ++trial) {
            SpecialVectorField a = random_special_field(Fp(3), 2, rng, DPLimits{4, 64});
            SpecialVectorField b = random_special_field(Fp(3), 2, rng, DPLimits{4, 64});
            SpecialVectorField br = witt_bracket(a, b);
            for (int probe = 0; probe < 5; ++probe) {
                DPPoly x = random_dp_poly(Fp(3), 2, rng, true, DPLimits{3, 64});
                REQUIRE(check_beck_identity(br, x).ok);
            }
        }
    }

    SECTION("Jacobi identity on sampled triples") {
        Rng rng(92);
        for (int trial = 0; trial < 10; ++trial) {
            SpecialVectorField a = random_special_field(Fp(3), 2, rng, DPLimits{3, 64});
            SpecialVectorField b = random_special_field(Fp(3), 2, rng, DPLimits{3, 64});
            SpecialVectorField c = random_special_field(Fp(3), 2, rng, DPLimits{3, 64});
            SpecialVectorField t1 = witt_bracket(a, witt_bracket(b, c));
            SpecialVectorField t2 = witt_bracket(b, witt_bracket(c, a));
            SpecialVectorField t3 = witt_bracket(c, witt_bracket(a, b));
            for (std::size_t j = 0; j < 2; ++j) {
                DPPoly sum = dp_add(dp_add(t1.components[j], t2.components[j]), t3.components[j]);
                REQUIRE(sum.is_zero());
            }
        }
    }

    SECTION("bracket application agrees with the commutator of actions") {
        Rng rng(93);
        for (int trial = 0; trial < 10; ++trial) {
            SpecialVectorField a = random_special_field(Fp(3), 2, rng, DPLimits{3, 64});
            SpecialVectorField b = random_special_field(Fp(3), 2, rng, DPLimits{3, 64});
            SpecialVectorField br = witt_bracket(a, b);
            DPPoly u = random_dp_poly(Fp(3), 2, rng, false, DPLimits{3, 64});
            DPPoly lhs = br.apply(u);
            DPPoly rhs = dp_sub(a.apply(b.apply(u)), b.apply(a.apply(u)));
            REQUIRE(lhs == rhs);
        }
    }
}

TEST_CASE("budget guards stop runaway growth") {
    Fp k(3);
    DPPoly big = DPPoly::gamma_var(k, 1, 0, 3000);
    REQUIRE_THROWS_AS(dp_multiply(big, big), BudgetExceeded);
}
