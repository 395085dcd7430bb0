#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "dpw/derivations.hpp"
#include "dpw/localization.hpp"

using namespace dpw;

namespace {

PDAlgebra cubic_with_square_pmap() {
    PDAlgebra P = truncated_polynomial_algebra(Fp(3));
    P.pi.images[0] = P.A.basis_vec(2);
    return P;
}

PDAlgebra split_algebra() {
    FiniteCommAlgebra A(Fp(3), {"1", "a", "w"}, {2});
    A.set_product(1, 1, {Term{1, 1}});
    A.set_product(1, 2, {Term{2, 1}});
    A.set_product(2, 2, {});
    PMap pi = PMap::zero(A);
    return PDAlgebra{std::move(A), std::move(pi)};
}

const CheckResult& check_named(const Report& r, const std::string& name) {
    auto it = std::find_if(r.checks.begin(), r.checks.end(),
                           [&](const CheckResult& c) { return c.name == name; });
    REQUIRE(it != r.checks.end());
    return *it;
}

}  // namespace

TEST_CASE("localizing the trivial module at units and at nilpotents") {
    PDAlgebra P = cubic_with_square_pmap();
    BeckModule M = trivial_module(P);

    SECTION("f = 1") {
        Report r = verify_localization_iso(P, M, P.A.unit());
        REQUIRE(r.all_pass());
        REQUIRE(check_named(r, "degeneracy-class").note == "unit");
        REQUIRE(check_named(r, "model-dims").dims == std::vector<std::int64_t>{3, 3});
    }
    SECTION("f = 1 + x") {
        Vec f = vec_add(Fp(3), P.A.unit(), P.A.basis_vec(1));
        Report r = verify_localization_iso(P, M, f);
        REQUIRE(r.all_pass());
        REQUIRE(check_named(r, "degeneracy-class").note == "unit");
    }
    SECTION("f = x") {
        Report r = verify_localization_iso(P, M, P.A.basis_vec(1));
        REQUIRE(r.all_pass());
        REQUIRE(check_named(r, "degeneracy-class").note == "nilpotent");
        REQUIRE(check_named(r, "model-dims").dims == std::vector<std::int64_t>{0, 0});
    }
}

TEST_CASE("localizing at an idempotent keeps a proper quotient") {
    PDAlgebra P = split_algebra();
    BeckModule M = trivial_module(P);
    Report r = verify_localization_iso(P, M, P.A.basis_vec(1));
    REQUIRE(r.all_pass());
    REQUIRE(check_named(r, "degeneracy-class").note == "proper");
    REQUIRE(check_named(r, "model-dims").dims == std::vector<std::int64_t>{2, 2});
}

TEST_CASE("universal derivation survives localization at a unit") {
    PDAlgebra P = cubic_with_square_pmap();
    Vec f = vec_add(Fp(3), P.A.unit(), P.A.basis_vec(1));
    Report r = localized_universal_derivation(P, f);
    REQUIRE(r.all_pass());
    REQUIRE(check_named(r, "fraction-differential-rule").dims == std::vector<std::int64_t>{6});
    REQUIRE(check_named(r, "kernel-is-p-ideal").note == "unit");
}

TEST_CASE("nilpotent localization is rejected for the universal derivation") {
    PDAlgebra P = cubic_with_square_pmap();
    REQUIRE_THROWS_AS(localized_universal_derivation(P, P.A.basis_vec(1)), ZeroLocalization);
}

TEST_CASE("derivation space transports along a unit localization") {
    PDAlgebra P = cubic_with_square_pmap();
    Vec f = vec_add(Fp(3), P.A.unit(), P.A.basis_vec(1));
    LocalizedAlgebra L = localize_algebra(P, f);
    REQUIRE(L.shape == LocalizedShape::Isomorphic);
    DerivationSolve before = special_derivations(P);
    DerivationSolve after = special_derivations(L.Af);
    REQUIRE(before.basis.size() == after.basis.size());
}
