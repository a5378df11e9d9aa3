#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fqgauss/cyclotomic.hpp"
#include "fqgauss/numtheory.hpp"
#include "fqgauss/residue.hpp"

namespace fqgauss {

// Runtime limits for enumeration and search, overridable per call.
struct Config {
    i64 max_order = 20000;
    i64 search_budget = 10'000'000;

    static Config from_env() {
        Config c;
        if (const char* s = std::getenv("FQGAUSS_MAX_ORDER")) c.max_order = std::atol(s);
        if (const char* s = std::getenv("FQGAUSS_SEARCH_BUDGET")) c.search_budget = std::atol(s);
        return c;
    }
};

inline const Config& default_config() {
    static Config c = Config::from_env();
    return c;
}

struct CapExceeded : std::runtime_error {
    i64 cap, requested;
    CapExceeded(const std::string& what, i64 cap_, i64 req)
        : std::runtime_error(what + " (cap " + std::to_string(cap_) + ", requested " + std::to_string(req) + ")"),
          cap(cap_),
          requested(req) {}
};

struct BudgetExceeded : std::runtime_error {
    i64 budget;
    explicit BudgetExceeded(i64 b)
        : std::runtime_error("isometry search budget exceeded (" + std::to_string(b) + ")"), budget(b) {}
};

struct ParseError : std::runtime_error {
    size_t pos;
    ParseError(const std::string& msg, size_t p)
        : std::runtime_error(msg + " (at position " + std::to_string(p) + ")"), pos(p) {}
};

// An element of a finite quadratic module, as coefficients on the generators.
struct Element {
    std::vector<i64> c;

    bool operator==(const Element& o) const { return c == o.c; }
    bool operator!=(const Element& o) const { return c != o.c; }
    bool is_zero() const {
        for (i64 v : c)
            if (v != 0) return false;
        return true;
    }
    std::string to_string() const {
        std::ostringstream os;
        os << "(";
        for (size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
        os << ")";
        return os.str();
    }
};

// A finite quadratic module: cyclic factor orders, exact q-values on the
// generators and exact pairings between distinct generators.
class FqForm {
  public:
    FqForm() = default;

    // Raw construction; offdiag[(i,j)] holds (e_i, e_j) for i < j in row-major
    // order. Validates well-definedness of q on the group.
    static FqForm raw(std::vector<i64> orders, std::vector<mpq_class> qdiag, std::vector<mpq_class> offdiag) {
        FqForm f;
        const size_t r = orders.size();
        if (qdiag.size() != r) throw std::invalid_argument("FqForm: qdiag size mismatch");
        if (offdiag.size() != r * (r - 1) / 2) throw std::invalid_argument("FqForm: offdiag size mismatch");
        for (i64 n : orders)
            if (n < 2) throw std::invalid_argument("FqForm: orders must be >= 2");
        f.orders_ = std::move(orders);
        f.qdiag_.reserve(r);
        for (auto& v : qdiag) f.qdiag_.push_back(mod_one(v));
        f.pairing_.assign(r * r, mpq_class(0));
        size_t k = 0;
        for (size_t i = 0; i < r; ++i)
            for (size_t j = i + 1; j < r; ++j, ++k) {
                mpq_class v = mod_one(offdiag[k]);
                f.pairing_[i * r + j] = v;
                f.pairing_[j * r + i] = v;
            }
        f.validate();
        return f;
    }

    int rank() const { return static_cast<int>(orders_.size()); }
    const std::vector<i64>& orders() const { return orders_; }
    const mpq_class& gen_q(int i) const { return qdiag_[static_cast<size_t>(i)]; }
    // (e_i, e_j) in Q/Z; the diagonal is 2 q(e_i) mod 1.
    mpq_class gen_pair(int i, int j) const {
        if (i == j) return mod_one(2 * qdiag_[static_cast<size_t>(i)]);
        return pairing_[static_cast<size_t>(i) * orders_.size() + static_cast<size_t>(j)];
    }

    i64 group_order() const {
        i64 n = 1;
        for (i64 o : orders_) n *= o;
        return n;
    }

    i64 exponent() const {
        i64 e = 1;
        for (i64 o : orders_) e = std::lcm(e, o);
        return e;
    }

    Element zero() const { return Element{std::vector<i64>(orders_.size(), 0)}; }

    Element reduce(Element x) const {
        for (size_t i = 0; i < orders_.size(); ++i) x.c[i] = mod_reduce(x.c[i], orders_[i]);
        return x;
    }

    // q(sum a_i e_i) = sum a_i^2 q_i + sum_{i<j} a_i a_j (e_i, e_j) mod 1.
    ResidueQZ q_of(const Element& x) const { return ResidueQZ(q_lift(x)); }

    ResidueQZ pair(const Element& x, const Element& y) const {
        const size_t r = orders_.size();
        mpq_class s = 0;
        for (size_t i = 0; i < r; ++i) {
            if (x.c[i] == 0) continue;
            for (size_t j = 0; j < r; ++j) {
                if (y.c[j] == 0) continue;
                mpq_class pij = (i == j) ? 2 * qdiag_[i] : pairing_[i * r + j];
                s += mpq_class(x.c[i]) * mpq_class(y.c[j]) * pij;
            }
        }
        return ResidueQZ(s);
    }

    // The refined norm (x, x) = 2 q(x), well-defined in Q/2Z.
    ResidueQ2Z norm2(const Element& x) const { return ResidueQ2Z(2 * q_lift(x)); }

    i64 element_order(const Element& x) const {
        i64 o = 1;
        for (size_t i = 0; i < orders_.size(); ++i)
            if (x.c[i] != 0) o = std::lcm(o, orders_[i] / std::gcd(x.c[i], orders_[i]));
        return o;
    }

    // Mixed-radix index with the first coordinate most significant, so index
    // order is lexicographic order on coefficient vectors.
    i64 index_of(const Element& x) const {
        i64 idx = 0;
        for (size_t i = 0; i < orders_.size(); ++i) idx = idx * orders_[i] + x.c[i];
        return idx;
    }

    Element element_at(i64 idx) const {
        Element x{std::vector<i64>(orders_.size(), 0)};
        for (size_t i = orders_.size(); i-- > 0;) {
            x.c[i] = idx % orders_[i];
            idx /= orders_[i];
        }
        return x;
    }

    void check_enumerable(const Config& cfg = default_config()) const {
        if (group_order() > cfg.max_order)
            throw CapExceeded("enumeration cap exceeded (FQGAUSS_MAX_ORDER)", cfg.max_order, group_order());
    }

    void for_each_element(const std::function<void(const Element&)>& fn,
                          const Config& cfg = default_config()) const {
        check_enumerable(cfg);
        const i64 n = group_order();
        Element x = zero();
        for (i64 idx = 0; idx < n; ++idx) {
            fn(x);
            for (size_t i = orders_.size(); i-- > 0;) {
                if (++x.c[i] < orders_[i]) break;
                x.c[i] = 0;
            }
        }
    }

    std::vector<Element> all_elements(const Config& cfg = default_config()) const {
        std::vector<Element> v;
        v.reserve(static_cast<size_t>(group_order()));
        for_each_element([&](const Element& x) { v.push_back(x); }, cfg);
        return v;
    }

    bool is_nondegenerate(const Config& cfg = default_config()) const {
        if (!nondeg_.has_value()) {
            bool nd = true;
            const i64 n = group_order();
            if (n > cfg.max_order)
                throw CapExceeded("nondegeneracy check cap exceeded", cfg.max_order, n);
            Element x = zero();
            for (i64 idx = 1; idx < n && nd; ++idx) {
                for (size_t i = orders_.size(); i-- > 0;) {
                    if (++x.c[i] < orders_[i]) break;
                    x.c[i] = 0;
                }
                bool radical = true;
                for (int j = 0; j < rank() && radical; ++j) {
                    Element ej = zero();
                    ej.c[static_cast<size_t>(j)] = 1;
                    if (!pair(x, ej).is_zero()) radical = false;
                }
                if (radical) nd = false;
            }
            nondeg_ = nd;
        }
        return *nondeg_;
    }

    bool is_2elementary() const {
        for (i64 o : orders_)
            if (o != 2) return false;
        return !orders_.empty();
    }

    bool is_p_elementary(i64 p) const {
        for (i64 o : orders_)
            if (o != p) return false;
        return !orders_.empty();
    }

    friend FqForm direct_sum(const FqForm& a, const FqForm& b) {
        FqForm f;
        const size_t ra = a.orders_.size(), rb = b.orders_.size(), r = ra + rb;
        f.orders_ = a.orders_;
        f.orders_.insert(f.orders_.end(), b.orders_.begin(), b.orders_.end());
        f.qdiag_ = a.qdiag_;
        f.qdiag_.insert(f.qdiag_.end(), b.qdiag_.begin(), b.qdiag_.end());
        f.pairing_.assign(r * r, mpq_class(0));
        for (size_t i = 0; i < ra; ++i)
            for (size_t j = 0; j < ra; ++j) f.pairing_[i * r + j] = a.pairing_[i * ra + j];
        for (size_t i = 0; i < rb; ++i)
            for (size_t j = 0; j < rb; ++j) f.pairing_[(ra + i) * r + (ra + j)] = b.pairing_[i * rb + j];
        if (a.nondeg_.has_value() && b.nondeg_.has_value()) f.nondeg_ = *a.nondeg_ && *b.nondeg_;
        return f;
    }

  private:
    std::vector<i64> orders_;
    std::vector<mpq_class> qdiag_;
    std::vector<mpq_class> pairing_;  // r x r symmetric, zero diagonal stored
    mutable std::optional<bool> nondeg_;

    mpq_class q_lift(const Element& x) const {
        const size_t r = orders_.size();
        mpq_class s = 0;
        for (size_t i = 0; i < r; ++i) {
            if (x.c[i] == 0) continue;
            s += mpq_class(x.c[i]) * mpq_class(x.c[i]) * qdiag_[i];
            for (size_t j = i + 1; j < r; ++j)
                if (x.c[j] != 0) s += mpq_class(x.c[i]) * mpq_class(x.c[j]) * pairing_[i * r + j];
        }
        return mod_one(s);
    }

    // Finite well-definedness check: shifting any coordinate by its order must
    // not change q, tested on x = 0 and on every generator.
    void validate() const {
        const size_t r = orders_.size();
        for (size_t i = 0; i < r; ++i) {
            mpq_class n(orders_[i]);
            if (mod_one(n * n * qdiag_[i]) != 0)
                throw std::invalid_argument("FqForm: q(e_" + std::to_string(i) + ") has invalid denominator");
            if (mod_one(2 * n * qdiag_[i]) != 0)
                throw std::invalid_argument("FqForm: q(e_" + std::to_string(i) + ") has invalid denominator");
            for (size_t j = 0; j < r; ++j)
                if (j != i && mod_one(n * pairing_[i * r + j]) != 0)
                    throw std::invalid_argument("FqForm: pairing (e_" + std::to_string(i) + ", e_" +
                                                std::to_string(j) + ") has invalid denominator");
        }
    }
};

inline CycNum e_of(const ResidueQZ& r) { return CycNum::root(r); }

// ---------------------------------------------------------------------------
// Block grammar
// ---------------------------------------------------------------------------

enum class BlockKind { Cyclic, HypOdd, AnisoOdd, U2, V2, Raw };

struct Block {
    BlockKind kind = BlockKind::Cyclic;
    i64 n = 0;   // Cyclic: prime power p^k
    i64 a = 0;   // Cyclic: unit scale
    i64 p = 0;   // prime
    int k = 0;   // Cyclic: exponent
    int mult = 1;
    std::vector<i64> raw_orders;
    std::vector<mpq_class> raw_qdiag, raw_offdiag;

    int dim() const {
        switch (kind) {
            case BlockKind::Cyclic: return 1;
            case BlockKind::HypOdd:
            case BlockKind::AnisoOdd:
            case BlockKind::U2:
            case BlockKind::V2: return 2;
            case BlockKind::Raw: return static_cast<int>(raw_orders.size());
        }
        return 0;
    }
};

struct BlockExpr {
    std::vector<Block> blocks;
    std::string source;

    bool has_raw() const {
        for (auto& b : blocks)
            if (b.kind == BlockKind::Raw) return true;
        return false;
    }
};

namespace detail {

class FormParser {
  public:
    explicit FormParser(const std::string& s) : s_(s) {}

    BlockExpr parse() {
        BlockExpr expr;
        expr.source = s_;
        skip_ws();
        if (eof()) return expr;  // empty input denotes the trivial form
        expr.blocks.push_back(parse_term());
        skip_ws();
        while (!eof()) {
            if (!consume_plus()) throw ParseError("expected '+' between terms", pos_);
            expr.blocks.push_back(parse_term());
            skip_ws();
        }
        return expr;
    }

  private:
    const std::string& s_;
    size_t pos_ = 0;

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }
    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool consume_plus() {
        skip_ws();
        if (peek() == '+') {
            ++pos_;
            return true;
        }
        // UTF-8 direct sum sign
        if (s_.compare(pos_, 3, "\xe2\x8a\x95") == 0) {
            pos_ += 3;
            return true;
        }
        return false;
    }

    bool consume(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!consume(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
    }

    i64 parse_int() {
        skip_ws();
        size_t start = pos_;
        bool neg = false;
        if (peek() == '-') {
            neg = true;
            ++pos_;
        }
        if (!std::isdigit(static_cast<unsigned char>(peek()))) throw ParseError("expected integer", pos_);
        i64 v = 0;
        while (!eof() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            v = v * 10 + (s_[pos_] - '0');
            if (v > 100'000'000) throw ParseError("integer too large", start);
            ++pos_;
        }
        return neg ? -v : v;
    }

    mpq_class parse_rational() {
        i64 num = parse_int();
        skip_ws();
        if (peek() == '/') {
            ++pos_;
            i64 den = parse_int();
            if (den == 0) throw ParseError("zero denominator", pos_);
            mpq_class q(num, den);
            q.canonicalize();
            return q;
        }
        return mpq_class(num);
    }

    std::vector<mpq_class> parse_rational_list(char terminator) {
        std::vector<mpq_class> v;
        skip_ws();
        if (peek() == terminator) return v;
        v.push_back(parse_rational());
        while (consume(',')) v.push_back(parse_rational());
        return v;
    }

    Block parse_term() {
        skip_ws();
        size_t start = pos_;
        int mult = 1;
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            // lookahead: integer followed by '*' is a multiplicity
            size_t save = pos_;
            i64 m = parse_int();
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                if (m < 1) throw ParseError("multiplicity must be >= 1", start);
                mult = static_cast<int>(m);
            } else {
                pos_ = save;
            }
        }
        Block b = parse_block();
        b.mult = mult;
        return b;
    }

    Block parse_block() {
        skip_ws();
        size_t start = pos_;
        if (s_.compare(pos_, 2, "U2") == 0) {
            pos_ += 2;
            Block b;
            b.kind = BlockKind::U2;
            b.p = 2;
            return b;
        }
        if (s_.compare(pos_, 2, "V2") == 0) {
            pos_ += 2;
            Block b;
            b.kind = BlockKind::V2;
            b.p = 2;
            return b;
        }
        if (peek() == 'q') {
            ++pos_;
            expect('(');
            i64 n = parse_int();
            expect(',');
            i64 a = parse_int();
            expect(')');
            Block b;
            b.kind = BlockKind::Cyclic;
            b.n = n;
            b.a = a;
            i64 p;
            int k;
            if (n < 2 || !is_prime_power(n, &p, &k))
                throw ParseError(std::to_string(n) + " is not a prime power", start);
            b.p = p;
            b.k = k;
            if (mod_reduce(a, p) == 0)
                throw ParseError("scale " + std::to_string(a) + " is not a unit mod " + std::to_string(p), start);
            b.a = (p == 2) ? mod_reduce(a, 2 * n) : mod_reduce(a, n);
            return b;
        }
        if (peek() == 'U' || peek() == 'N') {
            char kind = peek();
            ++pos_;
            expect('(');
            i64 p = parse_int();
            expect(')');
            if (!is_prime(p) || p == 2)
                throw ParseError("U(p)/N(p) require an odd prime, got " + std::to_string(p), start);
            Block b;
            b.kind = (kind == 'U') ? BlockKind::HypOdd : BlockKind::AnisoOdd;
            b.p = p;
            return b;
        }
        if (s_.compare(pos_, 5, "gram[") == 0) {
            pos_ += 5;
            Block b;
            b.kind = BlockKind::Raw;
            auto ords = parse_rational_list(';');
            expect(';');
            b.raw_qdiag = parse_rational_list(';');
            expect(';');
            b.raw_offdiag = parse_rational_list(']');
            expect(']');
            for (auto& o : ords) {
                if (o.get_den() != 1 || o < 2) throw ParseError("gram orders must be integers >= 2", start);
                b.raw_orders.push_back(static_cast<i64>(o.get_num().get_si()));
            }
            size_t r = b.raw_orders.size();
            if (b.raw_qdiag.size() != r) throw ParseError("gram: qdiag length mismatch", start);
            if (b.raw_offdiag.size() != r * (r - 1) / 2) throw ParseError("gram: offdiag length mismatch", start);
            return b;
        }
        throw ParseError("expected a block (q(n,a), U(p), N(p), U2, V2 or gram[...])", pos_);
    }
};

}  // namespace detail

inline BlockExpr parse_form(const std::string& text) { return detail::FormParser(text).parse(); }

inline FqForm realize_block(const Block& b) {
    switch (b.kind) {
        case BlockKind::Cyclic: {
            if (b.p == 2) {
                // q(e) = a / 2^{k+1}
                return FqForm::raw({b.n}, {mpq_class(b.a, 2 * b.n)}, {});
            }
            i64 inv2 = inv_mod(2, b.n);
            return FqForm::raw({b.n}, {mpq_class(mod_reduce(b.a * inv2, b.n), b.n)}, {});
        }
        case BlockKind::HypOdd:
            return FqForm::raw({b.p, b.p}, {mpq_class(0), mpq_class(0)}, {mpq_class(1, b.p)});
        case BlockKind::AnisoOdd: {
            i64 eps = least_nonresidue(b.p);
            i64 inv2 = inv_mod(2, b.p);
            FqForm f = FqForm::raw({b.p, b.p},
                                   {mpq_class(inv2, b.p), mpq_class(mod_reduce(-inv2 * eps, b.p), b.p)},
                                   {mpq_class(0)});
            // The construction must be anisotropic: no nonzero isotropic vector.
            for (i64 x = 0; x < b.p; ++x)
                for (i64 y = (x == 0 ? 1 : 0); y < b.p; ++y)
                    if (f.q_of(Element{{x, y}}).is_zero())
                        throw std::logic_error("anisotropic plane construction failed");
            return f;
        }
        case BlockKind::U2:
            return FqForm::raw({2, 2}, {mpq_class(0), mpq_class(0)}, {mpq_class(1, 2)});
        case BlockKind::V2:
            return FqForm::raw({2, 2}, {mpq_class(1, 2), mpq_class(1, 2)}, {mpq_class(1, 2)});
        case BlockKind::Raw:
            return FqForm::raw(b.raw_orders, b.raw_qdiag, b.raw_offdiag);
    }
    throw std::logic_error("realize_block: unreachable");
}

inline FqForm realize(const BlockExpr& expr) {
    FqForm f;  // trivial form
    for (auto& b : expr.blocks) {
        FqForm fb = realize_block(b);
        for (int i = 0; i < b.mult; ++i) f = direct_sum(f, fb);
    }
    return f;
}

// ---------------------------------------------------------------------------
// p-part decomposition
// ---------------------------------------------------------------------------

// The subform of elements of p-power order, with an embedding back into the
// ambient form. Generator i of the part is scale[i] * e_{src[i]}.
struct PPart {
    FqForm part;
    std::vector<int> src;
    std::vector<i64> scale;

    Element embed_into(const FqForm& ambient, const Element& x) const {
        Element y = ambient.zero();
        for (size_t i = 0; i < src.size(); ++i)
            y.c[static_cast<size_t>(src[i])] = x.c[i] * scale[i];
        return ambient.reduce(y);
    }
};

inline PPart p_part(const FqForm& A, i64 p) {
    PPart res;
    std::vector<i64> orders;
    for (int i = 0; i < A.rank(); ++i) {
        i64 n = A.orders()[static_cast<size_t>(i)];
        i64 pv = 1;
        while (n % p == 0) {
            n /= p;
            pv *= p;
        }
        if (pv > 1) {
            res.src.push_back(i);
            res.scale.push_back(n);  // n = order / p^v, coprime to p
            orders.push_back(pv);
        }
    }
    const size_t r = orders.size();
    std::vector<mpq_class> qdiag, offdiag;
    for (size_t i = 0; i < r; ++i) {
        mpq_class s(res.scale[i]);
        qdiag.push_back(mod_one(s * s * A.gen_q(res.src[i])));
    }
    for (size_t i = 0; i < r; ++i)
        for (size_t j = i + 1; j < r; ++j)
            offdiag.push_back(
                mod_one(mpq_class(res.scale[i]) * mpq_class(res.scale[j]) * A.gen_pair(res.src[i], res.src[j])));
    if (r == 0) {
        res.part = FqForm();
    } else {
        res.part = FqForm::raw(orders, qdiag, offdiag);
    }
    return res;
}

inline std::vector<i64> support_primes(const FqForm& A) {
    std::vector<i64> ps;
    for (i64 o : A.orders())
        for (auto& [p, k] : factorize(o))
            if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
    std::sort(ps.begin(), ps.end());
    return ps;
}

}  // namespace fqgauss
