#include <catch2/catch_amalgamated.hpp>

#include "fqgauss/fqm.hpp"
#include "fqgauss/orthogroup.hpp"

using namespace fqgauss;

namespace {

FqForm form(const std::string& s) { return realize(parse_form(s)); }

bool same_presentation(const FqForm& a, const FqForm& b) {
    if (a.orders() != b.orders()) return false;
    for (int i = 0; i < a.rank(); ++i) {
        if (a.gen_q(i) != b.gen_q(i)) return false;
        for (int j = 0; j < a.rank(); ++j)
            if (a.gen_pair(i, j) != b.gen_pair(i, j)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("grammar parses standard blocks") {
    BlockExpr e = parse_form("q(9,1)");
    REQUIRE(e.blocks.size() == 1);
    CHECK(e.blocks[0].kind == BlockKind::Cyclic);
    CHECK(e.blocks[0].n == 9);
    CHECK(e.blocks[0].a == 1);
    CHECK(e.blocks[0].p == 3);
    CHECK(e.blocks[0].k == 2);

    e = parse_form("U(5) + 2*q(2,1)");
    REQUIRE(e.blocks.size() == 2);
    CHECK(e.blocks[0].kind == BlockKind::HypOdd);
    CHECK(e.blocks[0].p == 5);
    CHECK(e.blocks[1].kind == BlockKind::Cyclic);
    CHECK(e.blocks[1].mult == 2);

    e = parse_form("  U2⊕V2 ");
    REQUIRE(e.blocks.size() == 2);
    CHECK(e.blocks[0].kind == BlockKind::U2);
    CHECK(e.blocks[1].kind == BlockKind::V2);

    CHECK(parse_form("").blocks.empty());
    CHECK(parse_form("gram[;;]").blocks.size() == 1);
    CHECK(realize(parse_form("gram[;;]")).rank() == 0);
}

TEST_CASE("grammar rejects invalid parameters") {
    CHECK_THROWS_AS(parse_form("q(6,1)"), ParseError);    // 6 is not a prime power
    CHECK_THROWS_AS(parse_form("q(4,2)"), ParseError);    // 2 is not a unit mod 2
    CHECK_THROWS_AS(parse_form("U(4)"), ParseError);
    CHECK_THROWS_AS(parse_form("N(2)"), ParseError);
    CHECK_THROWS_AS(parse_form("q(3,1) q(5,1)"), ParseError);
    CHECK_THROWS_AS(parse_form("0*q(3,1)"), ParseError);
    CHECK_THROWS_AS(parse_form("blah"), ParseError);
    CHECK_THROWS_AS(realize(parse_form("gram[4;1/3;]")), std::invalid_argument);  // bad denominator
}

TEST_CASE("realize standard blocks") {
    FqForm a31 = form("q(3,1)");
    REQUIRE(a31.orders() == std::vector<i64>{3});
    CHECK(a31.gen_q(0) == mpq_class(2, 3));  // 2^{-1} = 2 mod 3

    FqForm a21 = form("q(2,1)");
    CHECK(a21.gen_q(0) == mpq_class(1, 4));

    FqForm a83 = form("q(8,3)");
    CHECK(a83.gen_q(0) == mpq_class(3, 16));

    FqForm v2 = form("V2");
    CHECK(v2.q_of(Element{{1, 1}}) == ResidueQZ::frac(1, 2));

    FqForm u2 = form("U2");
    CHECK(u2.norm2(Element{{1, 1}}) == ResidueQ2Z::frac(1, 1));
    CHECK(u2.q_of(Element{{1, 1}}) == ResidueQZ::frac(1, 2));

    // N(p) realizes an anisotropic plane.
    for (i64 p : {3, 5, 7, 11}) {
        FqForm np = form("N(" + std::to_string(p) + ")");
        int iso = 0;
        np.for_each_element([&](const Element& x) {
            if (!x.is_zero() && np.q_of(x).is_zero()) ++iso;
        });
        CAPTURE(p);
        CHECK(iso == 0);
    }

    // q(x) = 0 for x = 0 in any form.
    CHECK(form("q(49,3)").q_of(Element{{0}}).is_zero());
}

TEST_CASE("direct sums") {
    FqForm a = form("q(3,1)");
    CHECK(same_presentation(direct_sum(FqForm(), a), a));

    FqForm s = form("q(3,1) + q(3,1)");
    CHECK(s.group_order() == 9);
    CHECK(s.q_of(Element{{1, 1}}) == ResidueQZ::frac(1, 3));  // 4/3 mod 1

    FqForm uv = form("U2 + V2");
    CHECK(uv.group_order() == 16);
    int qzero = 0;
    uv.for_each_element([&](const Element& x) {
        if (uv.q_of(x).is_zero()) ++qzero;
    });
    CHECK(qzero == 6);

    CHECK(same_presentation(form("q(3,1)+U2"), direct_sum(form("q(3,1)"), form("U2"))));
}

TEST_CASE("q and pairing are consistent") {
    // Polarization and q(ax) = a^2 q(x), exhaustively for small forms.
    for (const char* spec : {"q(3,1)", "q(9,2)", "q(4,3)", "q(8,5)", "U2", "V2", "U(3)", "N(3)", "U(5)",
                             "q(2,1)+q(3,1)+q(5,1)", "q(4,1)+V2", "q(25,2)", "gram[12;7/12;]"}) {
        FqForm A = form(spec);
        REQUIRE(A.group_order() <= 200);
        auto els = A.all_elements();
        CAPTURE(spec);
        for (auto& x : els) {
            for (auto& y : els) {
                Element xy = A.reduce(Element{x.c});
                for (size_t i = 0; i < xy.c.size(); ++i) xy.c[i] += y.c[i];
                xy = A.reduce(xy);
                CHECK(A.pair(x, y) == A.q_of(xy) - A.q_of(x) - A.q_of(y));
            }
            for (i64 a = 0; a <= A.exponent(); ++a) {
                Element ax = x;
                for (auto& c : ax.c) c *= a;
                ax = A.reduce(ax);
                CHECK(A.q_of(ax) == ResidueQZ(A.q_of(x).value() * a * a));
            }
        }
    }
}

TEST_CASE("p-part decomposition") {
    FqForm A = form("q(4,1)+q(3,1)");
    PPart p2 = p_part(A, 2);
    CHECK(p2.part.orders() == std::vector<i64>{4});
    CHECK(find_isometry(p2.part, form("q(4,1)")).has_value());
    CHECK(p_part(A, 5).part.rank() == 0);

    // Raw form on Z/12 with q(e) = 7/12: 2-part is generated by 3e.
    FqForm r12 = form("gram[12;7/12;]");
    PPart r2 = p_part(r12, 2);
    CHECK(r2.part.orders() == std::vector<i64>{4});
    CHECK(r2.part.gen_q(0) == mpq_class(1, 4));  // 9*7/12 mod 1
    Element g = r2.embed_into(r12, Element{{1}});
    CHECK(g == Element{{3}});

    // The p-parts reassemble the whole form.
    for (const char* spec : {"q(4,1)+q(3,1)", "q(8,3)+q(9,1)", "q(2,1)+q(3,2)+q(5,1)", "gram[12;1/24;]"}) {
        FqForm B = form(spec);
        FqForm sum;
        for (i64 p : support_primes(B)) sum = direct_sum(sum, p_part(B, p).part);
        CAPTURE(spec);
        CHECK(find_isometry(sum, B).has_value());
    }

    // p_part commutes with direct sums up to isometry.
    for (auto& [sa, sb] : std::vector<std::pair<const char*, const char*>>{
             {"q(4,1)", "q(3,1)"}, {"q(2,1)+q(3,1)", "q(4,3)"}, {"q(9,1)", "q(2,1)+q(5,1)"}}) {
        FqForm A1 = form(sa), B1 = form(sb);
        FqForm S = direct_sum(A1, B1);
        REQUIRE(S.group_order() <= 100);
        for (i64 p : support_primes(S)) {
            FqForm lhs = p_part(S, p).part;
            FqForm rhs = direct_sum(p_part(A1, p).part, p_part(B1, p).part);
            CAPTURE(sa, sb, p);
            if (lhs.rank() == 0) {
                CHECK(rhs.rank() == 0);
            } else {
                CHECK(find_isometry(lhs, rhs).has_value());
            }
        }
    }
}

TEST_CASE("nondegeneracy detection") {
    CHECK(form("U2").group_order() == 4);
    CHECK(form("q(9,1)").is_nondegenerate());
    CHECK(form("q(9,2)").is_nondegenerate());
    CHECK(form("q(2,1)").is_nondegenerate());
    for (i64 p : {3, 5, 7})
        CHECK(form("q(" + std::to_string(p) + "," + std::to_string(least_nonresidue(p)) + ")").is_nondegenerate());
    // Zero form on Z/3 is totally degenerate.
    CHECK_FALSE(form("gram[3;0;]").is_nondegenerate());
    // Enumeration caps are enforced.
    Config tiny;
    tiny.max_order = 10;
    CHECK_THROWS_AS(form("q(16,1)").all_elements(tiny), CapExceeded);
}

TEST_CASE("element order and indexing") {
    FqForm A = form("q(4,1)+q(3,1)");
    CHECK(A.element_order(Element{{2, 0}}) == 2);
    CHECK(A.element_order(Element{{1, 1}}) == 12);
    CHECK(A.element_order(A.zero()) == 1);
    for (i64 i = 0; i < A.group_order(); ++i) CHECK(A.index_of(A.element_at(i)) == i);
}
