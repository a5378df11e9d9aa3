#include <catch2/catch_amalgamated.hpp>

#include "fqgauss/closedform.hpp"

using namespace fqgauss;

namespace {

FqForm form(const std::string& s) { return realize(parse_form(s)); }

CycNum oracle(const std::string& s, GaussKind kind) {
    FqForm A = form(s);
    IsomGroup G = orthogonal_group(A);
    OrbitPartition P = orbits(A, G);
    return equivariant_gauss(A, G, P, kind).value;
}

CycNum closed(const std::string& s, GaussKind kind) {
    Verdict v = eval_closed(parse_form(s), kind);
    REQUIRE(v.supported);
    return v.value;
}

}  // namespace

TEST_CASE("cyclic closed forms, odd p") {
    CHECK(cyclic_odd(5, 1, 1, GaussKind::First) == sqrt_int(5));
    CHECK(cyclic_odd(5, 1, 1, GaussKind::Second).is_zero());
    CHECK(cyclic_odd(3, 1, 1, GaussKind::Second) == CycNum::from_int(1) - CycNum::root(1, 3));
    CHECK(cyclic_odd(3, 1, 1, GaussKind::First).is_zero());
    CHECK(cyclic_odd(3, 2, 2, GaussKind::First) == sqrt_int(9));  // (2/3)^2 sqrt(9)
    CHECK(cyclic_odd(7, 1, 1, GaussKind::First).is_zero());       // 7 = 3 mod 4
    CHECK(cyclic_odd(13, 1, 2, GaussKind::First) == -sqrt_int(13));
}

TEST_CASE("cyclic closed forms, p = 2") {
    CHECK(cyclic_two(1, 1, GaussKind::First).is_zero());
    CHECK(cyclic_two(2, 1, GaussKind::First) == CycNum::from_int(2));
    CHECK(cyclic_two(3, 3, GaussKind::First) == -sqrt_int(8));
    CHECK(cyclic_two(1, 1, GaussKind::Second) ==
          CycNum::root(7, 8) * CycNum::root(1, 4) * sqrt_int(2));  // 1 + i
    CHECK(cyclic_two(2, 1, GaussKind::Second).is_zero());
    // The zeta_4 exponent (a+1)^2/4 is well-defined mod 8 in a.
    for (i64 a : {1, 3, 5, 7}) {
        i64 e1 = (((a + 1) / 2) * ((a + 1) / 2)) % 4;
        i64 e2 = (((a + 9) / 2) * ((a + 9) / 2)) % 4;
        CHECK(e1 == e2);
        CHECK(cyclic_two(3, a, GaussKind::Second) == cyclic_two(3, a + 8, GaussKind::Second));
    }
}

TEST_CASE("odd elementary closed forms") {
    CHECK(elem_odd(5, 2, -1, GaussKind::First) == CycNum::from_int(10));
    CHECK(elem_odd(3, 2, 1, GaussKind::First) == CycNum::from_int(3));    // anisotropic plane at p=3
    CHECK(elem_odd(7, 2, -1, GaussKind::Second) == CycNum::from_int(14));
    CHECK(elem_odd(5, 2, -1, GaussKind::Second).is_zero());               // 5 = 2 mod 3
    CHECK(elem_odd(5, 2, 1, GaussKind::First) == CycNum::from_int(-5));   // anisotropic at p=5
    CHECK(elem_odd(7, 3, 1, GaussKind::First).is_zero());                 // 7 = 3 mod 4
    CHECK_THROWS_AS(elem_odd(5, 1, 1, GaussKind::First), std::invalid_argument);
    CHECK_THROWS_AS(elem_odd(5, 2, 5, GaussKind::First), std::invalid_argument);
}

TEST_CASE("2-elementary closed forms") {
    CHECK(two_elementary(form("U2+V2"), GaussKind::First) == CycNum::from_int(-4));
    CHECK(two_elementary(form("2*q(2,1)"), GaussKind::First) == CycNum::from_int(2));
    CHECK(two_elementary(form("3*q(2,1)"), GaussKind::Second) ==
          (CycNum::from_int(1) + CycNum::root(3, 4)).scaled(2));
    CHECK(two_elementary(form("V2"), GaussKind::First).is_zero());
    CHECK(two_elementary(form("V2"), GaussKind::Second) == CycNum::from_int(2));
    CHECK(two_elementary(form("U2"), GaussKind::Second).is_zero());
    CHECK(two_elementary(form("4*q(2,7)"), GaussKind::First) == CycNum::from_int(4));
    // Presentation variants resolve through the isometry relations.
    CHECK(two_elementary(form("V2+q(2,1)"), GaussKind::Second) ==
          two_elementary(form("3*q(2,7)"), GaussKind::Second));
}

TEST_CASE("product closed forms") {
    CHECK(product_rule(3, 2, 1, form("q(3,1)"), GaussKind::First).is_zero());
    CHECK(product_rule(2, 2, 1, form("2*q(2,1)"), GaussKind::First) == CycNum::from_int(4));
    CHECK(product_rule(2, 3, 1, form("U2+U2"), GaussKind::First) == sqrt_int(8).scaled(4));
    CHECK(product_rule(2, 3, 1, form("V2"), GaussKind::First) == sqrt_int(8).scaled(-2));
}

TEST_CASE("dispatcher examples") {
    CHECK(closed("q(5,1)", GaussKind::First) == sqrt_int(5));
    CHECK(closed("q(7,1)+U(7)", GaussKind::First).is_zero());
    CHECK(closed("q(8,1)+V2", GaussKind::First) == sqrt_int(8).scaled(-2));
    CHECK(closed("q(8,3)", GaussKind::First) == -sqrt_int(8));
    CHECK(closed("q(9,1)+q(3,1)", GaussKind::First).is_zero());

    Verdict v = eval_closed(parse_form("q(9,1)+q(3,1)"), GaussKind::First);
    REQUIRE(v.rules.size() == 1);
    CHECK(v.rules[0].second == RuleId::ProductOdd);

    v = eval_closed(parse_form("gram[4;1/8;]"), GaussKind::First);
    CHECK_FALSE(v.supported);

    v = eval_closed(parse_form("q(9,1)+q(9,1)"), GaussKind::First);
    CHECK_FALSE(v.supported);

    v = eval_closed(parse_form("q(8,1)+q(4,1)"), GaussKind::First);
    CHECK_FALSE(v.supported);
    v = eval_closed(parse_form("q(8,1)+q(4,1)"), GaussKind::Second);
    REQUIRE(v.supported);
    CHECK(v.value.is_zero());
    CHECK(v.rules[0].second == RuleId::Remark2nd);

    v = eval_closed(parse_form(""), GaussKind::First);
    REQUIRE(v.supported);
    CHECK(v.value == CycNum::from_int(1));
}

TEST_CASE("closed forms reproduce the oracle") {
    for (const char* s : {"q(3,1)", "q(9,2)", "q(27,1)", "q(5,1)", "q(25,2)", "q(7,3)", "q(49,1)",
                          "q(2,1)", "q(4,3)", "q(8,5)", "q(16,7)", "U(3)", "N(3)", "U(5)", "N(5)",
                          "q(3,1)+q(3,1)", "q(3,1)+q(3,2)", "U(3)+q(3,1)", "q(5,1)+q(5,2)",
                          "U2", "V2", "2*q(2,1)", "q(2,1)+q(2,7)", "3*q(2,7)", "4*q(2,1)", "U2+V2",
                          "U2+q(2,1)", "V2+q(2,7)", "q(9,1)+q(3,1)", "q(27,2)+q(3,1)", "q(25,1)+q(5,1)",
                          "q(4,1)+q(2,1)", "q(4,3)+2*q(2,1)", "q(8,1)+V2", "q(8,3)+U2", "q(16,1)+q(2,1)",
                          "q(16,3)+V2", "q(32,1)+q(2,7)", "q(4,1)+q(3,1)", "q(8,5)+q(9,1)",
                          "q(2,1)+q(3,1)+q(5,1)", "q(4,1)+U(3)"}) {
        CAPTURE(s);
        for (GaussKind kind : {GaussKind::First, GaussKind::Second}) {
            Verdict v = eval_closed(parse_form(s), kind);
            REQUIRE(v.supported);
            CHECK(v.value == oracle(s, kind));
        }
    }
}

TEST_CASE("mixed primes multiply over p-parts") {
    Verdict v = eval_closed(parse_form("q(4,1)+q(5,1)"), GaussKind::First);
    REQUIRE(v.supported);
    REQUIRE(v.rules.size() == 2);
    CycNum expect = cyclic_two(2, 1, GaussKind::First) * cyclic_odd(5, 1, 1, GaussKind::First);
    CHECK(v.value == expect);
    CHECK(v.value == sqrt_int(5).scaled(2));
}

TEST_CASE("product formula failures are detected, table values match the oracle") {
    // k = 3, B = V: the table value differs from the naive product.
    {
        CycNum table = closed("q(8,1)+V2", GaussKind::First);
        CycNum naive = cyclic_two(3, 1, GaussKind::First) * two_elementary(form("V2"), GaussKind::First);
        CHECK(table != naive);
        CHECK(table == oracle("q(8,1)+V2", GaussKind::First));
    }
    // k = 3, B = (A_{2,a})^2: non-special, the table gives 0.
    {
        CycNum table = closed("q(8,1)+2*q(2,1)", GaussKind::First);
        CycNum naive = cyclic_two(3, 1, GaussKind::First) * two_elementary(form("2*q(2,1)"), GaussKind::First);
        CHECK(table.is_zero());
        CHECK(!naive.is_zero());
        CHECK(table == oracle("q(8,1)+2*q(2,1)", GaussKind::First));
    }
    // k = 2, B = U: table 0, naive product 4.
    {
        CycNum table = closed("q(4,1)+U2", GaussKind::First);
        CycNum naive = cyclic_two(2, 1, GaussKind::First) * two_elementary(form("U2"), GaussKind::First);
        CHECK(table.is_zero());
        CHECK(naive == CycNum::from_int(4));
        CHECK(table == oracle("q(4,1)+U2", GaussKind::First));
    }
    // k = 2, B = A_{2,1} + A_{2,-1}: table 4, naive product 0.
    {
        CycNum table = closed("q(4,1)+q(2,1)+q(2,7)", GaussKind::First);
        CycNum naive =
            cyclic_two(2, 1, GaussKind::First) * two_elementary(form("q(2,1)+q(2,7)"), GaussKind::First);
        CHECK(table == CycNum::from_int(4));
        CHECK(naive.is_zero());
        CHECK(table == oracle("q(4,1)+q(2,1)+q(2,7)", GaussKind::First));
    }
    // k = 2, B = (A_{2,a})^2: here the table and the naive product agree (both
    // 4), and both match the oracle.
    {
        CycNum table = closed("q(4,1)+2*q(2,1)", GaussKind::First);
        CycNum naive = cyclic_two(2, 1, GaussKind::First) * two_elementary(form("2*q(2,1)"), GaussKind::First);
        CHECK(table == CycNum::from_int(4));
        CHECK(naive == table);
        CHECK(table == oracle("q(4,1)+2*q(2,1)", GaussKind::First));
    }
}

TEST_CASE("second-kind product formula holds for all k > 1") {
    for (const char* s : {"q(4,1)+V2", "q(8,1)+V2", "q(4,3)+U2", "q(8,1)+2*q(2,1)", "q(16,5)+q(2,1)"}) {
        CAPTURE(s);
        Verdict v = eval_closed(parse_form(s), GaussKind::Second);
        REQUIRE(v.supported);
        CHECK(v.rules[0].second == RuleId::Product2nd);
        CHECK(v.value == oracle(s, GaussKind::Second));
    }
}
