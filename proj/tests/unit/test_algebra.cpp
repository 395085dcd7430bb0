#include <catch2/catch_amalgamated.hpp>

#include "dpw/constructions.hpp"

using namespace dpw;

namespace {

// k[x]/x^3 over F_3 with pi(x) = x^2 (a valid shift of the zero p-map).
PDAlgebra cubic_with_square_pmap() {
    PDAlgebra P = truncated_polynomial_algebra(Fp(3));
    P.pi.images[0] = P.A.basis_vec(2);
    return P;
}

Vec vec_of(const FiniteCommAlgebra& A, std::initializer_list<std::pair<std::size_t, Scalar>> terms) {
    Vec v = A.zero();
    for (auto [i, c] : terms) v[i] = c;
    return v;
}

}  // namespace

TEST_CASE("truncated polynomial algebra shape", "[algebra]") {
    PDAlgebra P = truncated_polynomial_algebra(Fp(3));
    const FiniteCommAlgebra& A = P.A;
    REQUIRE(A.dim == 3);
    CHECK(A.labels == std::vector<std::string>{"1", "x", "x2"});
    CHECK(A.plus == std::vector<std::uint32_t>{1, 2});
    CHECK(A.multiply(A.basis_vec(1), A.basis_vec(1)) == A.basis_vec(2));
    CHECK(vec_is_zero(A.multiply(A.basis_vec(1), A.basis_vec(2))));
    CHECK(A.multiply(A.unit(), A.basis_vec(2)) == A.basis_vec(2));
    REQUIRE(verify_algebra_axioms(A).all_pass());
    REQUIRE(verify_pmap_axioms(A, P.pi).all_pass());
}

TEST_CASE("algebra axiom checker flags a broken table", "[algebra]") {
    PDAlgebra P = truncated_polynomial_algebra(Fp(3));
    // x*x2 = x breaks both associativity and the ideal property
    P.A.set_product(1, 2, {Term{1, 1}});
    Report rep = verify_algebra_axioms(P.A);
    CHECK(!rep.all_pass());
}

TEST_CASE("divided power algebra on one variable of height 1", "[algebra]") {
    PDAlgebra P = divided_power_algebra(Fp(3), {1});
    const FiniteCommAlgebra& A = P.A;
    REQUIRE(A.dim == 3);
    CHECK(A.labels == std::vector<std::string>{"1", "x1", "x1^(2)"});
    // x1 * x1 = binom(2,1) x1^(2) = 2 x1^(2)
    CHECK(A.multiply(A.basis_vec(1), A.basis_vec(1)) == vec_of(A, {{2, 2}}));
    // truncation kills the p-map entirely at height 1
    for (const Vec& img : P.pi.images) CHECK(vec_is_zero(img));
    REQUIRE(verify_algebra_axioms(A).all_pass());
    REQUIRE(verify_pmap_axioms(A, P.pi).all_pass());
}

TEST_CASE("divided power algebra on one variable of height 2", "[algebra]") {
    PDAlgebra P = divided_power_algebra(Fp(3), {2});
    const FiniteCommAlgebra& A = P.A;
    REQUIRE(A.dim == 9);
    // pi(x1) = x1^(3), pi(x1^(2)) = 0 (coefficient 15 = 0 mod 3),
    // pi(x1^(3)) = 0 (x1^(9) truncated away)
    CHECK(P.pi.images[0] == A.basis_vec(3));
    CHECK(vec_is_zero(P.pi.images[1]));
    CHECK(vec_is_zero(P.pi.images[2]));
    REQUIRE(verify_algebra_axioms(A).all_pass());
    REQUIRE(verify_pmap_axioms(A, P.pi).all_pass());

    SECTION("evaluation folds the sum rule over the decomposition") {
        Vec u = vec_add(A.k, A.basis_vec(1), A.basis_vec(2));  // x1 + x1^(2)
        CHECK(eval_pmap(A, P.pi, u) == A.basis_vec(3));
        CHECK(eval_pmap(A, P.pi, vec_scale(A.k, A.basis_vec(1), 2)) == vec_scale(A.k, A.basis_vec(3), 2));
    }
    SECTION("evaluation rejects arguments outside the ideal") {
        CHECK_THROWS_AS(eval_pmap(A, P.pi, A.unit()), NotInPlusPart);
    }
}

TEST_CASE("divided power algebra on two variables", "[algebra]") {
    PDAlgebra P = divided_power_algebra(Fp(3), {1, 1});
    const FiniteCommAlgebra& A = P.A;
    REQUIRE(A.dim == 9);
    REQUIRE(verify_algebra_axioms(A).all_pass());
    Report rep = verify_pmap_axioms(A, P.pi);
    REQUIRE(rep.all_pass());
    // mixed monomials are products of ideal elements, so their images vanish
    for (std::size_t t = 0; t < A.plus.size(); ++t) {
        const std::string& lab = A.labels[A.plus[t]];
        if (lab.find("x1") != std::string::npos && lab.find("x2") != std::string::npos)
            CHECK(vec_is_zero(P.pi.images[t]));
    }
}

TEST_CASE("two variables of height (1,2) at p=2", "[algebra]") {
    PDAlgebra P = divided_power_algebra(Fp(2), {1, 2});
    REQUIRE(P.A.dim == 8);
    REQUIRE(verify_algebra_axioms(P.A).all_pass());
    REQUIRE(verify_pmap_axioms(P.A, P.pi).all_pass());
}

TEST_CASE("height 1 at p=5", "[algebra]") {
    PDAlgebra P = divided_power_algebra(Fp(5), {1});
    REQUIRE(P.A.dim == 5);
    REQUIRE(verify_algebra_axioms(P.A).all_pass());
    REQUIRE(verify_pmap_axioms(P.A, P.pi).all_pass());
}

TEST_CASE("dimension cap on divided power algebras", "[algebra]") {
    CHECK_THROWS_AS(divided_power_algebra(Fp(3), {2, 2}, 16), DimensionCapExceeded);
}

TEST_CASE("pmap axiom checker flags an invalid assignment", "[algebra]") {
    PDAlgebra P = truncated_polynomial_algebra(Fp(3));
    // pi(x2) = x is illegal: x2 = x*x forces pi(x2) = 0
    P.pi.images[1] = P.A.basis_vec(1);
    Report rep = verify_pmap_axioms(P.A, P.pi);
    CHECK(!rep.all_pass());
    bool products_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "pmap-products-vanish" && !c.pass) products_failed = true;
    CHECK(products_failed);
}

TEST_CASE("pi(x) = x^2 on the cubic algebra passes every axiom", "[algebra]") {
    PDAlgebra P = cubic_with_square_pmap();
    REQUIRE(verify_pmap_axioms(P.A, P.pi).all_pass());
    // pi(2x) = (2^3) x^2 = 2 x^2
    CHECK(eval_pmap(P.A, P.pi, vec_scale(P.A.k, P.A.basis_vec(1), 2)) == vec_of(P.A, {{2, 2}}));
    // pi(x + x2) = pi(x) + pi(x2) + corr; corr(x, x2) = 0 since x^k x2^{3-k} = 0
    CHECK(eval_pmap(P.A, P.pi, vec_of(P.A, {{1, 1}, {2, 1}})) == P.A.basis_vec(2));
}

TEST_CASE("shifting a p-map by an admissible linear map", "[algebra]") {
    PDAlgebra P = truncated_polynomial_algebra(Fp(3));
    SECTION("phi(x) = x^2 recovers the square p-map") {
        PMap phi = PMap::zero(P.A);
        phi.images[0] = P.A.basis_vec(2);
        PMap shifted = shift_pmap(P.A, P.pi, phi);
        CHECK(shifted.images[0] == P.A.basis_vec(2));
        CHECK(verify_pmap_axioms(P.A, shifted).all_pass());
    }
    SECTION("phi(x) = x is admissible here and still yields a valid p-map") {
        PMap phi = PMap::zero(P.A);
        phi.images[0] = P.A.basis_vec(1);
        PMap shifted = shift_pmap(P.A, P.pi, phi);
        CHECK(verify_pmap_axioms(P.A, shifted).all_pass());
    }
    SECTION("phi(x2) != 0 is rejected: x2 is a product of ideal elements") {
        PMap phi = PMap::zero(P.A);
        phi.images[1] = P.A.basis_vec(2);
        CHECK_THROWS_AS(shift_pmap(P.A, P.pi, phi), InvalidShift);
    }
    SECTION("phi landing outside the ideal is rejected") {
        PMap phi = PMap::zero(P.A);
        phi.images[0] = P.A.unit();
        CHECK_THROWS_AS(shift_pmap(P.A, P.pi, phi), InvalidShift);
    }
}

TEST_CASE("divided power reconstruction from the p-map", "[algebra]") {
    SECTION("gamma_2(x) = 2 x^2 on the cubic algebra") {
        PDAlgebra P = cubic_with_square_pmap();
        CHECK(reconstruct_gamma(P.A, P.pi, 2, P.A.basis_vec(1)) == vec_of(P.A, {{2, 2}}));
        CHECK(reconstruct_gamma(P.A, P.pi, 0, P.A.basis_vec(1)) == P.A.unit());
        CHECK(reconstruct_gamma(P.A, P.pi, 1, P.A.basis_vec(1)) == P.A.basis_vec(1));
        // gamma_3 = pi itself
        CHECK(reconstruct_gamma(P.A, P.pi, 3, P.A.basis_vec(1)) == P.A.basis_vec(2));
    }
    SECTION("gamma_n(x1) = x1^(n) in a divided power algebra") {
        PDAlgebra P = divided_power_algebra(Fp(3), {2});
        for (std::uint64_t n = 0; n <= 8; ++n) {
            Vec expect = P.A.basis_vec(n);
            CHECK(reconstruct_gamma(P.A, P.pi, n, P.A.basis_vec(1)) == expect);
        }
        // out-of-range divided powers vanish
        CHECK(vec_is_zero(reconstruct_gamma(P.A, P.pi, 9, P.A.basis_vec(1))));
        CHECK(vec_is_zero(reconstruct_gamma(P.A, P.pi, 11, P.A.basis_vec(1))));
    }
    SECTION("product identity gamma_i gamma_j = binom(i+j,i) gamma_{i+j}") {
        PDAlgebra P = divided_power_algebra(Fp(3), {2});
        const Fp& k = P.A.k;
        Vec x = vec_add(k, P.A.basis_vec(1), vec_scale(k, P.A.basis_vec(2), 2));
        for (std::uint64_t i = 0; i <= 4; ++i)
            for (std::uint64_t j = 0; j <= 4; ++j) {
                Vec lhs = P.A.multiply(reconstruct_gamma(P.A, P.pi, i, x), reconstruct_gamma(P.A, P.pi, j, x));
                Vec rhs = vec_scale(k, reconstruct_gamma(P.A, P.pi, i + j, x), binom_mod_p(k, i + j, i));
                CHECK(lhs == rhs);
            }
    }
    SECTION("n! gamma_n(x) = x^n") {
        PDAlgebra P = divided_power_algebra(Fp(5), {1});
        const Fp& k = P.A.k;
        Vec x = vec_add(k, P.A.basis_vec(1), P.A.basis_vec(3));
        for (std::uint64_t n = 0; n <= 6; ++n) {
            Vec lhs = vec_scale(k, reconstruct_gamma(P.A, P.pi, n, x), factorial_mod_p(k, n));
            CHECK(lhs == P.A.power(x, n));
        }
    }
}

TEST_CASE("p-ideal recognition and quotients", "[algebra]") {
    PDAlgebra P = cubic_with_square_pmap();
    const FiniteCommAlgebra& A = P.A;

    SECTION("span{x2} is a p-ideal; the quotient is the dual numbers") {
        Subspace J = Subspace::span(A.k, A.dim, {A.basis_vec(2)});
        PIdealCheck chk = is_p_ideal(A, P.pi, J);
        CHECK(chk.ok());
        QuotientAlgebra Q = quotient_algebra(A, P.pi, J);
        REQUIRE(Q.alg.dim == 2);
        CHECK(verify_algebra_axioms(Q.alg).all_pass());
        CHECK(verify_pmap_axioms(Q.alg, Q.pi).all_pass());
        // x^2 = 0 downstairs, pi(x) = 0 downstairs
        CHECK(vec_is_zero(Q.alg.multiply(Q.alg.basis_vec(1), Q.alg.basis_vec(1))));
        CHECK(vec_is_zero(Q.pi.images[0]));
        // projection is an algebra map on a spot check
        Vec img = Q.projection.apply(vec_of(A, {{0, 1}, {1, 2}, {2, 1}}));
        CHECK(img == Vec{1, 2});
    }

    SECTION("span{x} is not an ideal") {
        Subspace J = Subspace::span(A.k, A.dim, {A.basis_vec(1)});
        PIdealCheck chk = is_p_ideal(A, P.pi, J);
        CHECK(!chk.is_ideal);
        CHECK_THROWS_AS(quotient_algebra(A, P.pi, J), NotAPIdeal);
    }

    SECTION("span{x2} fails p-stability when pi(x2) leaves it") {
        PDAlgebra Q = truncated_polynomial_algebra(Fp(3));
        Q.pi.images[1] = Q.A.basis_vec(1);  // not a valid p-map, but the stability check is separate
        Subspace J = Subspace::span(Q.A.k, Q.A.dim, {Q.A.basis_vec(2)});
        PIdealCheck chk = is_p_ideal(Q.A, Q.pi, J);
        CHECK(chk.is_ideal);
        CHECK(!chk.is_p_stable);
    }

    SECTION("ideal generated by x is all of A_+") {
        Subspace J = ideal_generated_by(A, {A.basis_vec(1)});
        CHECK(J.dim() == 2);
        Subspace J2 = ideal_generated_by(A, {A.basis_vec(2)});
        CHECK(J2.dim() == 1);
    }

    SECTION("quotient by the whole ideal leaves the ground field") {
        Subspace J = ideal_generated_by(A, {A.basis_vec(1)});
        QuotientAlgebra Q = quotient_algebra(A, P.pi, J);
        CHECK(Q.alg.dim == 1);
        CHECK(Q.alg.plus.empty());
    }
}

TEST_CASE("mixed monomial images vanish under evaluation", "[algebra]") {
    // x1 x2^(2) + x1^(2) x2 is a sum of products, so its image is zero,
    // but eval on x1 + x2 picks up the cross terms of the sum rule
    PDAlgebra P = divided_power_algebra(Fp(3), {1, 1});
    const FiniteCommAlgebra& A = P.A;
    std::size_t ix1 = 0, ix2 = 0;
    for (std::size_t i = 0; i < A.dim; ++i) {
        if (A.labels[i] == "x1") ix1 = i;
        if (A.labels[i] == "x2") ix2 = i;
    }
    REQUIRE(ix1 != 0);
    REQUIRE(ix2 != 0);
    Vec sum = vec_add(A.k, A.basis_vec(ix1), A.basis_vec(ix2));
    Vec lhs = eval_pmap(A, P.pi, sum);
    Vec rhs = pmap_correction(A, A.basis_vec(ix1), A.basis_vec(ix2));
    CHECK(lhs == rhs);
}

TEST_CASE("three-way sums fold the same in every order", "[algebra]") {
    auto fold3 = [](const PDAlgebra& P, const Vec& a, const Vec& b, const Vec& c) {
        const Fp& k = P.A.k;
        Vec acc = vec_add(k, vec_add(k, eval_pmap(P.A, P.pi, a), eval_pmap(P.A, P.pi, b)), pmap_correction(P.A, a, b));
        acc = vec_add(k, vec_add(k, acc, eval_pmap(P.A, P.pi, c)), pmap_correction(P.A, vec_add(k, a, b), c));
        return acc;
    };
    std::vector<PDAlgebra> battery;
    battery.push_back(cubic_with_square_pmap());
    battery.push_back(divided_power_algebra(Fp(3), {2}));
    battery.push_back(divided_power_algebra(Fp(2), {1, 2}));
    battery.push_back(divided_power_algebra(Fp(5), {1}));
    Rng rng(31);
    for (const PDAlgebra& P : battery) {
        for (int s = 0; s < 250; ++s) {
            Vec x = random_plus_element(P.A, rng);
            Vec y = random_plus_element(P.A, rng);
            Vec z = random_plus_element(P.A, rng);
            Vec direct = eval_pmap(P.A, P.pi, vec_add(P.A.k, vec_add(P.A.k, x, y), z));
            REQUIRE(fold3(P, x, y, z) == direct);
            REQUIRE(fold3(P, y, z, x) == direct);
            REQUIRE(fold3(P, z, x, y) == direct);
        }
    }
}

TEST_CASE("enumerate_span visits p^n points", "[algebra]") {
    PDAlgebra P = truncated_polynomial_algebra(Fp(3));
    std::size_t count = 0;
    enumerate_span(P.A, P.A.plus, [&](const Vec&) { ++count; });
    CHECK(count == 9);
}
