#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "fqgauss/gauss.hpp"

using namespace fqgauss;

namespace {

FqForm form(const std::string& s) { return realize(parse_form(s)); }

// Floating reference for the equivariant sums, summed directly from the
// definition; independent of the exact cyclotomic path.
std::complex<double> numeric_equivariant(const FqForm& A, const IsomGroup& G, GaussKind kind) {
    auto P = orbits(A, G);
    std::complex<double> total(0, 0);
    for (size_t k = 0; k < P.reps.size(); ++k) {
        Element x = A.element_at(P.reps[k]);
        std::complex<double> inner(0, 0);
        for (i64 idx : P.orbit_elements[k]) {
            double ang = 2.0 * M_PI * A.pair(x, A.element_at(idx)).value().get_d();
            inner += std::complex<double>(std::cos(ang), std::sin(ang));
        }
        if (kind == GaussKind::Second) {
            double ang = -2.0 * M_PI * A.q_of(x).value().get_d();
            inner *= std::complex<double>(std::cos(ang), std::sin(ang));
        }
        total += inner;
    }
    return total;
}

const std::vector<std::string>& small_library() {
    static std::vector<std::string> lib = {
        "q(3,1)", "q(3,2)", "q(9,1)", "q(5,1)", "q(5,2)", "q(7,1)",  "q(2,1)",      "q(2,7)",
        "q(4,1)", "q(4,3)", "q(8,5)", "U2",     "V2",     "U(3)",    "N(3)",        "2*q(2,1)",
        "3*q(2,1)", "U2+V2", "q(4,1)+q(2,1)", "q(2,1)+q(3,1)", "q(4,3)+q(3,2)", "q(9,2)+q(3,1)",
    };
    return lib;
}

}  // namespace

TEST_CASE("orbit pairing examples") {
    {
        FqForm A = form("U(3)");
        IsomGroup G = orthogonal_group(A);
        Element x{{1, 2}};  // representative of the stratum of norm 1/3
        CHECK(orbit_pairing(A, G, x, x) == CycNum::from_int(-1));
        CHECK(orbit_pairing(A, G, A.zero(), A.zero()) == CycNum::from_int(1));
    }
    {
        FqForm A = form("q(3,1)");
        IsomGroup G = orthogonal_group(A);
        Element x{{1}};
        CHECK(orbit_pairing(A, G, x, x) == CycNum::root(1, 3) + CycNum::root(2, 3));
        CHECK(orbit_pairing(A, G, x, x) == CycNum::from_int(-1));
    }
}

TEST_CASE("equivariant Gauss sums, first kind") {
    FqForm a31 = form("q(3,1)");
    CHECK(equivariant_gauss(a31, orthogonal_group(a31)).value.is_zero());

    CHECK(equivariant_gauss(FqForm(), orthogonal_group(FqForm())).value == CycNum::from_int(1));

    FqForm u5 = form("U(5)");
    CHECK(equivariant_gauss(u5, orthogonal_group(u5)).value == CycNum::from_int(10));
}

TEST_CASE("equivariant Gauss sums, second kind") {
    FqForm a31 = form("q(3,1)");
    CHECK(equivariant_gauss2(a31, orthogonal_group(a31)).value ==
          CycNum::from_int(1) - CycNum::root(1, 3));

    CHECK(equivariant_gauss2(FqForm(), orthogonal_group(FqForm())).value == CycNum::from_int(1));

    FqForm u7 = form("U(7)");
    CHECK(equivariant_gauss2(u7, orthogonal_group(u7)).value == CycNum::from_int(14));
}

TEST_CASE("classical Gauss sums") {
    FqForm a31 = form("q(3,1)");
    CHECK(classical_gauss(a31, GaussKind::First).value ==
          CycNum::from_int(1) + CycNum::root(1, 3).scaled(2));

    FqForm a21 = form("q(2,1)");
    CHECK(classical_gauss(a21, GaussKind::Second).value == CycNum::from_int(1) + CycNum::root(1, 4));

    CHECK(classical_gauss(FqForm(), GaussKind::First).value == CycNum::from_int(1));
    CHECK(classical_gauss(FqForm(), GaussKind::Second).value == CycNum::from_int(1));
}

TEST_CASE("exact sums agree with a floating reference") {
    for (auto& spec : small_library()) {
        FqForm A = form(spec);
        IsomGroup G = orthogonal_group(A);
        OrbitPartition P = orbits(A, G);
        CAPTURE(spec);
        auto g1 = equivariant_gauss(A, G, P, GaussKind::First);
        auto g2 = equivariant_gauss(A, G, P, GaussKind::Second);
        CHECK(std::abs(g1.value.to_complex() - numeric_equivariant(A, G, GaussKind::First)) < 1e-9);
        CHECK(std::abs(g2.value.to_complex() - numeric_equivariant(A, G, GaussKind::Second)) < 1e-9);
    }
}

TEST_CASE("representative independence and realness") {
    for (auto& spec : small_library()) {
        FqForm A = form(spec);
        if (A.group_order() > 48) continue;
        IsomGroup G = orthogonal_group(A);
        OrbitPartition P = orbits(A, G);
        CAPTURE(spec);
        for (size_t k = 0; k < P.reps.size(); ++k) {
            Element rep = A.element_at(P.reps[k]);
            CycNum ref = orbit_pairing(A, G, rep, rep);
            CHECK(ref.conj() == ref);  // -id lies in O(A)
            for (i64 idx : P.orbit_elements[k]) {
                Element x = A.element_at(idx);
                CHECK(orbit_pairing(A, G, x, x) == ref);
            }
        }
        CycNum g = equivariant_gauss(A, G, P, GaussKind::First).value;
        CHECK(g.conj() == g);
    }
}

TEST_CASE("product decomposition over subgroup products") {
    std::vector<std::string> parts = {"q(3,1)", "q(5,2)", "U2", "V2"};
    for (auto& s1 : parts)
        for (auto& s2 : parts) {
            FqForm A1 = form(s1), A2 = form(s2);
            FqForm A = direct_sum(A1, A2);
            IsomGroup G1 = orthogonal_group(A1), G2 = orthogonal_group(A2);
            IsomGroup G = orthogonal_group(A);
            // Γ = Γ1 × Γ2 inside O(A), from block-diagonal generators.
            std::vector<Isometry> gens;
            for (size_t i = 0; i < G1.size(); ++i)
                gens.push_back(isometry_direct_sum(A1, A2, G1.at(i), identity_isometry(A2)));
            for (size_t i = 0; i < G2.size(); ++i)
                gens.push_back(isometry_direct_sum(A1, A2, identity_isometry(A1), G2.at(i)));
            IsomGroup Gamma = subgroup_from_generators(A, G, gens);
            REQUIRE(Gamma.size() == G1.size() * G2.size());
            CAPTURE(s1, s2);
            CHECK(equivariant_gauss(A, Gamma).value ==
                  equivariant_gauss(A1, G1).value * equivariant_gauss(A2, G2).value);
            CHECK(equivariant_gauss2(A, Gamma).value ==
                  equivariant_gauss2(A1, G1).value * equivariant_gauss2(A2, G2).value);
        }
}

TEST_CASE("signature by exact Milgram matching") {
    CHECK(signature(FqForm()) == 0);
    CHECK(signature(form("V2")) == 4);
    CHECK(signature(form("q(3,2)")) == 2);
    CHECK(signature(form("q(3,1)")) == 6);
    CHECK(signature(form("U2")) == 0);
    CHECK(signature(form("q(2,1)")) == 1);
    CHECK(signature(form("q(2,7)")) == 7);

    // Additivity under direct sums.
    for (auto& s1 : small_library())
        for (auto& s2 : {"q(3,1)", "V2", "q(8,5)"}) {
            FqForm A = form(s1), B = form(s2);
            CAPTURE(s1, s2);
            CHECK(signature(direct_sum(A, B)) == (signature(A) + signature(B)) % 8);
        }

    // Milgram eighth-power identity.
    for (auto& spec : small_library()) {
        FqForm A = form(spec);
        GaussValue gp = classical_gauss(A, GaussKind::Second);
        mpq_class n4(A.group_order());
        n4 = n4 * n4 * n4 * n4;
        CAPTURE(spec);
        CHECK(gp.value.pow(8) == CycNum::from_rational(n4));
    }
}

TEST_CASE("localization over p-parts") {
    CHECK(localization_check(form("q(4,1)+q(3,1)")));
    CHECK(localization_check(form("q(4,1)+q(5,1)")));
    CHECK(localization_check(form("q(9,1)")));  // single prime, trivially
    CHECK(localization_check(form("q(8,3)+q(9,2)")));
    CHECK(localization_check(form("U2+q(3,1)+q(5,2)")));

    // Spot value: first kind of q(4,1)+q(5,1) is 2 sqrt(5).
    FqForm A = form("q(4,1)+q(5,1)");
    CHECK(equivariant_gauss(A, orthogonal_group(A)).value == sqrt_int(5).scaled(2));
    FqForm B = form("q(4,1)+q(3,1)");
    CHECK(equivariant_gauss(B, orthogonal_group(B)).value.is_zero());
}
