#pragma once

#include <cassert>
#include <map>
#include <string>

#include "fqgauss/gauss.hpp"

namespace fqgauss {

enum class RuleId {
    CyclicOdd,
    ElemOddIso,
    ElemOddAniso,
    ProductOdd,
    CyclicTwo,
    TwoElemWithU,
    TwoElemNoU,
    ProductTwoK4,
    ProductTwoK3,
    ProductTwoK2,
    CyclicOdd2nd,
    ElemOddIso2nd,
    ElemOddAniso2nd,
    TwoElem2nd,
    Product2nd,
    Remark2nd,
    Localize,
};

inline const char* rule_name(RuleId r) {
    switch (r) {
        case RuleId::CyclicOdd: return "CyclicOdd";
        case RuleId::ElemOddIso: return "ElemOddIso";
        case RuleId::ElemOddAniso: return "ElemOddAniso";
        case RuleId::ProductOdd: return "ProductOdd";
        case RuleId::CyclicTwo: return "CyclicTwo";
        case RuleId::TwoElemWithU: return "TwoElemWithU";
        case RuleId::TwoElemNoU: return "TwoElemNoU";
        case RuleId::ProductTwoK4: return "ProductTwoK4";
        case RuleId::ProductTwoK3: return "ProductTwoK3";
        case RuleId::ProductTwoK2: return "ProductTwoK2";
        case RuleId::CyclicOdd2nd: return "CyclicOdd2nd";
        case RuleId::ElemOddIso2nd: return "ElemOddIso2nd";
        case RuleId::ElemOddAniso2nd: return "ElemOddAniso2nd";
        case RuleId::TwoElem2nd: return "TwoElem2nd";
        case RuleId::Product2nd: return "Product2nd";
        case RuleId::Remark2nd: return "Remark2nd";
        case RuleId::Localize: return "Localize";
    }
    return "?";
}

struct Verdict {
    bool supported = false;
    CycNum value;
    std::string reason;                         // set when unsupported
    std::vector<std::pair<i64, RuleId>> rules;  // per-prime rule applications

    std::string rule_string() const {
        if (!supported) return "unsupported";
        if (rules.empty()) return "Localize";
        std::string s;
        for (size_t i = 0; i < rules.size(); ++i) {
            if (i) s += " * ";
            s += rule_name(rules[i].second);
            if (rules.size() > 1) s += "(p=" + std::to_string(rules[i].first) + ")";
        }
        return s;
    }
};

// ---------------------------------------------------------------------------
// Closed forms for single rules
// ---------------------------------------------------------------------------

inline CycNum cyclic_odd(i64 p, int k, i64 a, GaussKind kind) {
    if (p == 2 || !is_prime(p)) throw std::invalid_argument("cyclic_odd: p must be an odd prime");
    i64 pk = 1;
    for (int i = 0; i < k; ++i) pk *= p;
    if (kind == GaussKind::First) {
        if (pk % 4 == 3) return CycNum::zero();
        int s = kronecker(a, p);
        return sqrt_int(pk).scaled((k % 2 == 1) ? s : 1);
    }
    if (p == 3) {
        // -sqrt(-1)^{k^2} (-a/3)^k zeta_3^{-a} sqrt(3^k)
        int s = kronecker(-a, 3);
        CycNum v = CycNum::root((k * k) % 4, 4) * CycNum::root(mod_reduce(-a, 3), 3) * sqrt_int(pk);
        return (-v).scaled((k % 2 == 1) ? s : 1);
    }
    int half = (1 + ((k % 2 == 1) ? kronecker(p, 3) : 1));
    if (half == 0) return CycNum::zero();
    int s = (k % 2 == 1) ? kronecker(2 * a, p) : 1;
    CycNum v = sqrt_int(pk).scaled(s);
    if (pk % 4 == 3) v = v * CycNum::root(1, 4);
    return v;  // half/2 = 1 here
}

inline CycNum cyclic_two(int k, i64 a, GaussKind kind) {
    if (a % 2 == 0) throw std::invalid_argument("cyclic_two: a must be odd");
    i64 pk = i64(1) << k;
    if (kind == GaussKind::First) {
        if (k == 1) return CycNum::zero();
        int s = (k % 2 == 1) ? kronecker(2, a) : 1;
        return sqrt_int(pk).scaled(s);
    }
    if (k % 2 == 0) return CycNum::zero();
    // (2/a)^{k+1} zeta_8^{-1} zeta_4^{(a+1)^2/4} sqrt(2^k), with (a+1)^2/4
    // well-defined mod 4 from a mod 8.
    a = mod_reduce(a, 8);
    i64 e4 = (((a + 1) / 2) * ((a + 1) / 2)) % 4;
    return CycNum::root(7, 8) * CycNum::root(e4, 4) * sqrt_int(pk);  // (2/a)^{k+1} = 1 for k odd
}

// p-elementary spaces of dimension m >= 2 over F_p, p odd; d is (any
// representative of) the discriminant of the scaled Gram matrix. Isotropy is
// determined by (m, d).
inline CycNum elem_odd(i64 p, int m, i64 d, GaussKind kind) {
    if (p == 2 || !is_prime(p)) throw std::invalid_argument("elem_odd: p must be an odd prime");
    if (m < 2) throw std::invalid_argument("elem_odd: dimension must be >= 2 (cyclic forms are handled separately)");
    if (kronecker(d, p) == 0) throw std::invalid_argument("elem_odd: discriminant must be a unit");
    i64 pm = 1;
    for (int i = 0; i < m; ++i) pm *= p;
    const bool isotropic = (m >= 3) || kronecker(-d, p) == 1;

    if (kind == GaussKind::First) {
        if (!isotropic) return CycNum::from_int((p % 4 == 1) ? -p : p);  // (-1)^{(p+1)/2} p
        if (p % 4 == 3) return CycNum::zero();
        i64 delta = sqrt_minus_one(p);
        int s1 = kronecker(2 * delta, p);
        int s2 = kronecker(2 * mod_reduce(p - delta, p), p);
        if (m % 2 == 1 && s1 != s2) throw std::logic_error("elem_odd: delta choice changed the value");
        int sign = ((m % 2 == 1) ? s1 : 1) * kronecker(d, p);
        return sqrt_int(pm).scaled(2 * sign);
    }

    if (!isotropic) return CycNum::from_int(-kronecker(p, 3) * p);
    if (p == 3) {
        // sqrt(-1)^{-m} (d/3) sqrt(3^m)
        return CycNum::root(mod_reduce(-m, 4), 4) * sqrt_int(pm).scaled(kronecker(d, 3));
    }
    if (p % 3 == 2) return CycNum::zero();
    i64 delta = primitive_sixth_root(p);
    int s1 = kronecker(2 * delta, p);
    int s2 = kronecker(2 * mod_reduce(1 - delta, p), p);
    if (s1 != s2) throw std::logic_error("elem_odd: sixth-root choice changed the value");
    int k = m / 2;
    int sign = ((m % 2 == 1) ? s1 : 1) * kronecker((k % 2 == 1) ? -d : d, p);
    i64 e16 = mod_reduce(static_cast<i64>(m) * m * (p - 1) * (p - 1), 16);
    return CycNum::root(e16, 16) * sqrt_int(pm).scaled(2 * sign);
}

namespace detail {

enum class TwoElemCase { V, Pair, Sq1, Sq7, Cube1, Cube7, Fourth };

inline std::vector<int> qcode_fingerprint(const FqForm& B) {
    std::vector<int> codes;
    B.for_each_element([&](const Element& x) {
        mpq_class v = B.q_of(x).value() * 4;
        codes.push_back(static_cast<int>(v.get_num().get_si()));
    });
    std::sort(codes.begin(), codes.end());
    return codes;
}

// Isometry classes of U-free 2-elementary forms, recognized by the multiset
// of q-values (a complete invariant for this finite list).
inline std::optional<TwoElemCase> classify_two_elem_nou(const FqForm& B) {
    static std::map<std::vector<int>, TwoElemCase> table = [] {
        std::map<std::vector<int>, TwoElemCase> t;
        auto put = [&](const std::string& spec, TwoElemCase c) {
            t[qcode_fingerprint(realize(parse_form(spec)))] = c;
        };
        put("V2", TwoElemCase::V);
        put("q(2,1)+q(2,7)", TwoElemCase::Pair);
        put("2*q(2,1)", TwoElemCase::Sq1);
        put("2*q(2,7)", TwoElemCase::Sq7);
        put("3*q(2,1)", TwoElemCase::Cube1);
        put("3*q(2,7)", TwoElemCase::Cube7);
        put("4*q(2,1)", TwoElemCase::Fourth);
        return t;
    }();
    auto it = table.find(qcode_fingerprint(B));
    if (it == table.end()) return std::nullopt;
    return it->second;
}

// delta_B and the norm counts of a special 2-elementary form, through the
// identity |B_0| - |B_1| = delta_B sqrt(|B|).
inline int special_delta(const FqForm& B) {
    i64 n0 = 0, n1 = 0;
    B.for_each_element([&](const Element& x) {
        auto nu = B.norm2(x);
        if (nu.is_zero())
            ++n0;
        else if (nu.value() == 1)
            ++n1;
    });
    i64 diff = n0 - n1;
    i64 root = 1;
    while (root * root < B.group_order()) ++root;
    if (root * root != B.group_order() || (diff != root && diff != -root))
        throw std::logic_error("special_delta: form is not special");
    return diff > 0 ? 1 : -1;
}

}  // namespace detail

// 2-elementary forms: the with-U / U-free case split of the first kind and
// the second-kind table.
inline CycNum two_elementary(const FqForm& B, GaussKind kind) {
    if (!B.is_2elementary()) throw std::invalid_argument("two_elementary: form is not 2-elementary");
    if (B.rank() == 1) {
        mpq_class a4 = B.gen_q(0) * 4;
        return cyclic_two(1, static_cast<i64>(a4.get_num().get_si()), kind);
    }
    const bool with_u = contains_U_summand(B).has_value();
    if (kind == GaussKind::First) {
        if (with_u) {
            if (!characteristic_element(B).is_zero()) return CycNum::zero();
            return sqrt_int(B.group_order()).scaled(detail::special_delta(B));
        }
        auto c = detail::classify_two_elem_nou(B);
        if (!c) throw std::logic_error("two_elementary: U-free form outside the finite case list");
        switch (*c) {
            case detail::TwoElemCase::V:
            case detail::TwoElemCase::Pair:
            case detail::TwoElemCase::Cube1:
            case detail::TwoElemCase::Cube7: return CycNum::zero();
            case detail::TwoElemCase::Sq1:
            case detail::TwoElemCase::Sq7:
            case detail::TwoElemCase::Fourth: return sqrt_int(B.group_order());
        }
    }
    if (with_u) return CycNum::zero();
    auto c = detail::classify_two_elem_nou(B);
    if (!c) throw std::logic_error("two_elementary: U-free form outside the finite case list");
    switch (*c) {
        case detail::TwoElemCase::Sq1:
        case detail::TwoElemCase::Sq7: return CycNum::zero();
        case detail::TwoElemCase::V:
        case detail::TwoElemCase::Pair:
        case detail::TwoElemCase::Fourth: return sqrt_int(B.group_order());
        case detail::TwoElemCase::Cube1:
            return (CycNum::from_int(1) + CycNum::root(3, 4)).scaled(2);  // 2(1 + i^{-1})
        case detail::TwoElemCase::Cube7:
            return (CycNum::from_int(1) + CycNum::root(1, 4)).scaled(2);  // 2(1 + i^{-7})
    }
    throw std::logic_error("two_elementary: unreachable");
}

namespace detail {

// Discriminant of the scaled Gram matrix of a p-elementary form, mod p.
inline i64 elementary_discriminant(const FqForm& B, i64 p) {
    const int m = B.rank();
    std::vector<std::vector<i64>> g(static_cast<size_t>(m), std::vector<i64>(static_cast<size_t>(m)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            mpq_class v = B.gen_pair(i, j) * p;
            g[static_cast<size_t>(i)][static_cast<size_t>(j)] = mod_reduce(v.get_num().get_si(), p);
        }
    i64 det = 1;
    for (int col = 0; col < m; ++col) {
        int sel = -1;
        for (int i = col; i < m; ++i)
            if (g[static_cast<size_t>(i)][static_cast<size_t>(col)] != 0) {
                sel = i;
                break;
            }
        if (sel < 0) return 0;
        if (sel != col) {
            std::swap(g[static_cast<size_t>(sel)], g[static_cast<size_t>(col)]);
            det = p - det;
        }
        i64 piv = g[static_cast<size_t>(col)][static_cast<size_t>(col)];
        det = mul_mod(det, piv, p);
        i64 inv = inv_mod(piv, p);
        for (int i = col + 1; i < m; ++i) {
            i64 f = mul_mod(g[static_cast<size_t>(i)][static_cast<size_t>(col)], inv, p);
            if (f == 0) continue;
            for (int j = col; j < m; ++j)
                g[static_cast<size_t>(i)][static_cast<size_t>(j)] = mod_reduce(
                    g[static_cast<size_t>(i)][static_cast<size_t>(j)] - f * g[static_cast<size_t>(col)][static_cast<size_t>(j)], p);
        }
    }
    return det;
}

// Closed form for an elementary form at p (any dimension >= 1).
inline CycNum elementary_value(const FqForm& B, i64 p, GaussKind kind) {
    if (p == 2) return two_elementary(B, kind);
    if (B.rank() == 1) {
        mpq_class a = B.gen_pair(0, 0) * p;  // (e,e) = a/p
        return cyclic_odd(p, 1, mod_reduce(a.get_num().get_si(), p), kind);
    }
    return elem_odd(p, B.rank(), elementary_discriminant(B, p), kind);
}

}  // namespace detail

// A = q(p^k, a) ⊕ B with k > 1 and B elementary at the same prime.
inline CycNum product_rule(i64 p, int k, i64 a, const FqForm& B, GaussKind kind) {
    if (k < 2) throw std::invalid_argument("product_rule: requires k > 1");
    if (kind == GaussKind::Second) {
        CycNum gc = (p == 2) ? cyclic_two(k, a, kind) : cyclic_odd(p, k, a, kind);
        return gc * detail::elementary_value(B, p, kind);
    }
    if (p != 2) return cyclic_odd(p, k, a, kind) * detail::elementary_value(B, p, kind);
    if (k >= 4) return cyclic_two(k, a, kind) * two_elementary(B, kind);
    if (k == 3) {
        if (!characteristic_element(B).is_zero()) return CycNum::zero();
        auto c = detail::classify_two_elem_nou(B);
        if (c && *c == detail::TwoElemCase::V) return cyclic_two(3, a, kind).scaled(-2);
        return cyclic_two(3, a, kind) * two_elementary(B, kind);
    }
    // k == 2
    auto c = detail::classify_two_elem_nou(B);
    if (c && (*c == detail::TwoElemCase::Sq1 || *c == detail::TwoElemCase::Sq7 || *c == detail::TwoElemCase::Pair))
        return CycNum::from_int(4);
    return CycNum::zero();
}

// ---------------------------------------------------------------------------
// Dispatcher
// ---------------------------------------------------------------------------

namespace detail {

struct PrimeVerdict {
    bool supported = false;
    CycNum value;
    RuleId rule = RuleId::Localize;
    std::string reason;
};

inline PrimeVerdict eval_prime(i64 p, const std::vector<Block>& blocks, GaussKind kind) {
    PrimeVerdict out;
    std::vector<Block> cyc_deep;  // cyclic blocks with k >= 2
    std::vector<Block> elem;      // exponent-1 blocks
    for (auto& b : blocks) {
        if (b.kind == BlockKind::Cyclic && b.k >= 2)
            cyc_deep.push_back(b);
        else
            elem.push_back(b);
    }
    int m = 0;
    for (auto& b : elem) m += b.dim();

    auto elem_form = [&]() {
        FqForm B;
        for (auto& b : elem) B = direct_sum(B, realize_block(b));
        return B;
    };

    if (cyc_deep.empty()) {
        if (m == 1) {
            // A single cyclic block of exponent 1; the second-kind cyclic rule
            // covers p = 2 and p odd in one statement.
            const Block& b = elem.front();
            out.supported = true;
            out.value = (p == 2) ? cyclic_two(1, b.a, kind) : cyclic_odd(p, 1, b.a, kind);
            if (kind == GaussKind::Second)
                out.rule = RuleId::CyclicOdd2nd;
            else
                out.rule = (p == 2) ? RuleId::CyclicTwo : RuleId::CyclicOdd;
            return out;
        }
        if (p == 2) {
            FqForm B = elem_form();
            out.supported = true;
            out.value = two_elementary(B, kind);
            if (kind == GaussKind::Second)
                out.rule = RuleId::TwoElem2nd;
            else
                out.rule = contains_U_summand(B).has_value() ? RuleId::TwoElemWithU : RuleId::TwoElemNoU;
            return out;
        }
        // Odd p-elementary: discriminant from the block data.
        i64 d = 1;
        for (auto& b : elem) {
            if (b.kind == BlockKind::Cyclic)
                d = mod_reduce(d * b.a, p);
            else if (b.kind == BlockKind::HypOdd)
                d = mod_reduce(-d, p);
            else
                d = mod_reduce(-d * least_nonresidue(p), p);
        }
        bool isotropic = (m >= 3) || kronecker(-d, p) == 1;
        out.supported = true;
        out.value = elem_odd(p, m, d, kind);
        if (kind == GaussKind::First)
            out.rule = isotropic ? RuleId::ElemOddIso : RuleId::ElemOddAniso;
        else
            out.rule = isotropic ? RuleId::ElemOddIso2nd : RuleId::ElemOddAniso2nd;
        return out;
    }

    if (cyc_deep.size() == 1) {
        const Block& c = cyc_deep.front();
        if (m == 0) {
            out.supported = true;
            if (p == 2) {
                out.value = cyclic_two(c.k, c.a, kind);
                out.rule = (kind == GaussKind::First) ? RuleId::CyclicTwo : RuleId::CyclicOdd2nd;
            } else {
                out.value = cyclic_odd(p, c.k, c.a, kind);
                out.rule = (kind == GaussKind::First) ? RuleId::CyclicOdd : RuleId::CyclicOdd2nd;
            }
            return out;
        }
        FqForm B = elem_form();
        out.supported = true;
        out.value = product_rule(p, c.k, c.a, B, kind);
        if (kind == GaussKind::Second)
            out.rule = RuleId::Product2nd;
        else if (p != 2)
            out.rule = RuleId::ProductOdd;
        else
            out.rule = (c.k >= 4) ? RuleId::ProductTwoK4 : (c.k == 3 ? RuleId::ProductTwoK3 : RuleId::ProductTwoK2);
        return out;
    }

    if (p == 2 && kind == GaussKind::Second && cyc_deep.size() == 2) {
        bool has4 = (cyc_deep[0].n == 4) || (cyc_deep[1].n == 4);
        bool elem_ok = elem.empty() || (elem.size() == 1 && elem[0].kind == BlockKind::Cyclic);
        if (has4 && elem_ok) {
            out.supported = true;
            out.value = CycNum::zero();
            out.rule = RuleId::Remark2nd;
            return out;
        }
    }

    out.reason = "no closed form at p=" + std::to_string(p) + " for this block shape";
    return out;
}

}  // namespace detail

inline Verdict eval_closed(const BlockExpr& expr, GaussKind kind) {
    Verdict v;
    if (expr.has_raw()) {
        v.reason = "raw gram input has no block structure";
        return v;
    }
    // Group the expanded blocks per prime.
    std::map<i64, std::vector<Block>> per_prime;
    for (auto& b : expr.blocks) {
        Block copy = b;
        copy.mult = 1;
        for (int i = 0; i < b.mult; ++i) per_prime[b.p].push_back(copy);
    }
    v.supported = true;
    v.value = CycNum::from_int(1);
    for (auto& [p, blocks] : per_prime) {
        detail::PrimeVerdict pv = detail::eval_prime(p, blocks, kind);
        if (!pv.supported) {
            v.supported = false;
            v.reason = pv.reason;
            v.rules.clear();
            return v;
        }
        v.value = v.value * pv.value;
        v.rules.emplace_back(p, pv.rule);
    }
    return v;
}

}  // namespace fqgauss
