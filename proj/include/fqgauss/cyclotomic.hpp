#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fqgauss/numtheory.hpp"
#include "fqgauss/residue.hpp"

namespace fqgauss {

namespace detail {

// Exact division of integer polynomials with monic divisor (ascending coefficients).
inline std::vector<mpz_class> poly_div_exact(std::vector<mpz_class> num, const std::vector<mpz_class>& den) {
    const int nd = static_cast<int>(num.size()) - 1;
    const int dd = static_cast<int>(den.size()) - 1;
    if (nd < dd) throw std::logic_error("poly_div_exact: degree underflow");
    std::vector<mpz_class> quot(nd - dd + 1);
    for (int i = nd; i >= dd; --i) {
        if (num[i] == 0) continue;
        mpz_class c = num[i];
        quot[i - dd] = c;
        for (int j = 0; j <= dd; ++j) num[i - dd + j] -= c * den[j];
    }
    for (int i = 0; i < dd; ++i)
        if (num[i] != 0) throw std::logic_error("poly_div_exact: nonzero remainder");
    return quot;
}

// f(x^s): spread coefficients with stride s.
inline std::vector<mpz_class> poly_stretch(const std::vector<mpz_class>& f, i64 s) {
    std::vector<mpz_class> g((f.size() - 1) * s + 1);
    for (size_t i = 0; i < f.size(); ++i) g[i * s] = f[i];
    return g;
}

struct PhiInfo {
    std::vector<mpz_class> coeffs;                  // ascending, monic
    std::vector<std::pair<i64, mpz_class>> tail;    // nonzero coefficients below the leading term
    i64 degree = 0;
};

inline const PhiInfo& cyclotomic_info(i64 n) {
    static std::map<i64, PhiInfo> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    i64 rad = 1;
    for (auto& [p, k] : factorize(n)) rad *= p;
    std::vector<mpz_class> f = {mpz_class(-1), mpz_class(1)};  // Phi_1 = x - 1
    i64 built = 1;
    for (auto& [p, k] : factorize(rad)) {
        (void)k;
        // Phi_{mp}(x) = Phi_m(x^p) / Phi_m(x) for p not dividing m
        std::vector<mpz_class> fp = poly_stretch(f, p);
        f = poly_div_exact(std::move(fp), f);
        built *= p;
    }
    if (n != rad) f = poly_stretch(f, n / rad);  // Phi_n(x) = Phi_rad(x^{n/rad})

    PhiInfo info;
    info.coeffs = std::move(f);
    info.degree = static_cast<i64>(info.coeffs.size()) - 1;
    for (i64 i = 0; i < info.degree; ++i)
        if (info.coeffs[i] != 0) info.tail.emplace_back(i, info.coeffs[i]);
    auto [pos, ok] = cache.emplace(n, std::move(info));
    (void)ok;
    return pos->second;
}

}  // namespace detail

inline const std::vector<mpz_class>& cyclotomic_poly(i64 n) { return detail::cyclotomic_info(n).coeffs; }

// An exact element of the cyclotomic field Q(zeta_L), stored as a sparse
// rational combination of the roots of unity e(j/L).
class CycNum {
  public:
    CycNum() : order_(1) {}

    static CycNum zero() { return CycNum(); }

    static CycNum from_int(i64 v) { return from_rational(mpq_class(v)); }

    static CycNum from_rational(const mpq_class& v) {
        CycNum r;
        if (v != 0) r.terms_.emplace_back(0, v);
        return r;
    }

    static CycNum root(i64 j, i64 L) {
        if (L < 1) throw std::domain_error("CycNum::root: order must be positive");
        CycNum r;
        r.order_ = L;
        r.terms_.emplace_back(mod_reduce(j, L), mpq_class(1));
        return r;
    }

    // e(r) for r in Q/Z.
    static CycNum root(const ResidueQZ& r) { return root(r.num(), r.den()); }

    // Assemble from (exponent, coefficient) pairs; exponents are reduced mod L
    // and duplicates combined.
    static CycNum from_terms(i64 L, std::vector<std::pair<i64, mpq_class>> terms) {
        if (L < 1) throw std::domain_error("CycNum::from_terms: order must be positive");
        CycNum r;
        r.order_ = L;
        for (auto& [e, c] : terms) e = mod_reduce(e, L);
        std::sort(terms.begin(), terms.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (auto& [e, c] : terms) {
            if (!r.terms_.empty() && r.terms_.back().first == e) {
                r.terms_.back().second += c;
                if (r.terms_.back().second == 0) r.terms_.pop_back();
            } else if (c != 0) {
                r.terms_.emplace_back(e, c);
            }
        }
        return r;
    }

    i64 order() const { return order_; }
    const std::vector<std::pair<i64, mpq_class>>& terms() const { return terms_; }

    CycNum embedded(i64 L) const {
        if (L % order_ != 0) throw std::logic_error("CycNum::embedded: not a multiple of the order");
        CycNum r;
        r.order_ = L;
        i64 s = L / order_;
        r.terms_.reserve(terms_.size());
        for (auto& [e, c] : terms_) r.terms_.emplace_back(e * s, c);
        return r;
    }

    friend CycNum operator+(const CycNum& a, const CycNum& b) {
        i64 L = common_order(a, b);
        CycNum ea = a.embedded(L), eb = b.embedded(L);
        CycNum r;
        r.order_ = L;
        size_t i = 0, j = 0;
        while (i < ea.terms_.size() || j < eb.terms_.size()) {
            if (j == eb.terms_.size() || (i < ea.terms_.size() && ea.terms_[i].first < eb.terms_[j].first)) {
                r.terms_.push_back(ea.terms_[i++]);
            } else if (i == ea.terms_.size() || eb.terms_[j].first < ea.terms_[i].first) {
                r.terms_.push_back(eb.terms_[j++]);
            } else {
                mpq_class c = ea.terms_[i].second + eb.terms_[j].second;
                if (c != 0) r.terms_.emplace_back(ea.terms_[i].first, c);
                ++i;
                ++j;
            }
        }
        return r;
    }

    friend CycNum operator-(const CycNum& a, const CycNum& b) { return a + (-b); }

    CycNum operator-() const {
        CycNum r = *this;
        for (auto& [e, c] : r.terms_) c = -c;
        return r;
    }

    friend CycNum operator*(const CycNum& a, const CycNum& b) {
        i64 L = common_order(a, b);
        CycNum ea = a.embedded(L), eb = b.embedded(L);
        CycNum r;
        r.order_ = L;
        const size_t na = ea.terms_.size(), nb = eb.terms_.size();
        if (na == 0 || nb == 0) return r;
        // Integer convolution over a common denominator.
        mpz_class den = 1;
        for (auto& [e, c] : ea.terms_) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
        for (auto& [e, c] : eb.terms_) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
        std::vector<std::pair<i64, mpz_class>> ta, tb;
        ta.reserve(na);
        tb.reserve(nb);
        mpz_class den2 = den * den;
        for (auto& [e, c] : ea.terms_) ta.emplace_back(e, mpz_class(c.get_num() * (den / c.get_den())));
        for (auto& [e, c] : eb.terms_) tb.emplace_back(e, mpz_class(c.get_num() * (den / c.get_den())));
        auto push = [&](i64 e, const mpz_class& v) {
            if (v != 0) {
                mpq_class q(v, den2);
                q.canonicalize();
                r.terms_.emplace_back(e, q);
            }
        };
        if (static_cast<i64>(na) * static_cast<i64>(nb) >= L) {
            std::vector<mpz_class> acc(static_cast<size_t>(L));
            for (auto& [e1, c1] : ta)
                for (auto& [e2, c2] : tb) acc[static_cast<size_t>((e1 + e2) % L)] += c1 * c2;
            for (i64 e = 0; e < L; ++e) push(e, acc[static_cast<size_t>(e)]);
        } else {
            std::map<i64, mpz_class> acc;
            for (auto& [e1, c1] : ta)
                for (auto& [e2, c2] : tb) acc[(e1 + e2) % L] += c1 * c2;
            for (auto& [e, c] : acc) push(e, c);
        }
        return r;
    }

    CycNum scaled(const mpq_class& s) const {
        CycNum r;
        r.order_ = order_;
        if (s == 0) return r;
        r.terms_ = terms_;
        for (auto& [e, c] : r.terms_) c *= s;
        return r;
    }

    CycNum conj() const {
        CycNum r;
        r.order_ = order_;
        r.terms_.reserve(terms_.size());
        for (auto& [e, c] : terms_) r.terms_.emplace_back(e == 0 ? 0 : order_ - e, c);
        std::sort(r.terms_.begin(), r.terms_.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        return r;
    }

    CycNum pow(unsigned e) const {
        CycNum r = from_int(1), b = *this;
        while (e > 0) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    bool is_zero() const {
        if (terms_.empty()) return true;
        if (terms_.size() == 1) return false;  // a single nonzero multiple of a root
        // Descend through the gcd of the support before reducing.
        i64 L = order_;
        i64 g = L;
        for (auto& [e, c] : terms_) g = std::gcd(g, e);
        if (g == 0) g = L;
        i64 Lr = L / g;
        if (Lr == 1) {
            mpq_class s = 0;
            for (auto& [e, c] : terms_) s += c;
            return s == 0;
        }
        // Clear denominators and reduce over Z.
        mpz_class den = 1;
        for (auto& [e, c] : terms_) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
        std::vector<mpz_class> r(static_cast<size_t>(Lr));
        for (auto& [e, c] : terms_) r[static_cast<size_t>(e / g)] += c.get_num() * (den / c.get_den());
        const auto& phi = detail::cyclotomic_info(Lr);
        mpz_class c;
        for (i64 i = Lr - 1; i >= phi.degree; --i) {
            if (r[static_cast<size_t>(i)] == 0) continue;
            mpz_swap(c.get_mpz_t(), r[static_cast<size_t>(i)].get_mpz_t());
            r[static_cast<size_t>(i)] = 0;
            for (auto& [k, pk] : phi.tail) r[static_cast<size_t>(i - phi.degree + k)] -= c * pk;
        }
        for (i64 i = 0; i < phi.degree; ++i)
            if (r[static_cast<size_t>(i)] != 0) return false;
        return true;
    }

    bool operator==(const CycNum& o) const { return (*this - o).is_zero(); }
    bool operator!=(const CycNum& o) const { return !(*this == o); }

    std::complex<double> to_complex() const {
        std::complex<double> s(0.0, 0.0);
        for (auto& [e, c] : terms_) {
            double ang = 2.0 * M_PI * static_cast<double>(e) / static_cast<double>(order_);
            s += c.get_d() * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        return s;
    }

    // Canonical representation at the minimal embedded order (after reduction
    // modulo the cyclotomic polynomial), used for rendering and comparisons of
    // printed output.
    CycNum reduced() const {
        CycNum v = *this;
        for (int round = 0; round < 8; ++round) {
            bool changed = false;
            while (v.descend_gcd() || v.descend_odd_double()) changed = true;
            if (v.terms_.empty()) {
                v.order_ = 1;
                return v;
            }
            if (v.phi_reduce()) changed = true;
            if (!changed) break;
        }
        return v;
    }

    std::string to_string() const {
        CycNum v = reduced();
        if (v.terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [e, c] : v.terms_) {
            mpq_class a = c;
            bool neg = a < 0;
            if (neg) a = -a;
            if (first) {
                if (neg) os << "-";
                first = false;
            } else {
                os << (neg ? " - " : " + ");
            }
            if (e == 0) {
                os << a.get_str();
            } else {
                if (a != 1) os << a.get_str() << "*";
                os << "e(" << e << "/" << v.order_ << ")";
            }
        }
        return os.str();
    }

  private:
    i64 order_;
    std::vector<std::pair<i64, mpq_class>> terms_;

    static i64 common_order(const CycNum& a, const CycNum& b) {
        i64 L = std::lcm(a.order_, b.order_);
        if (L > 50'000'000) throw std::overflow_error("CycNum: common order too large");
        return L;
    }

    bool descend_gcd() {
        if (terms_.empty() || order_ == 1) return false;
        i64 g = order_;
        for (auto& [e, c] : terms_) g = std::gcd(g, e);
        if (g <= 1) return false;
        order_ /= g;
        for (auto& [e, c] : terms_) e /= g;
        return true;
    }

    // For L ≡ 2 mod 4, Q(zeta_L) = Q(zeta_{L/2}): e(j/2m) = (-1)^j e(j(m+1)/2 / m).
    bool descend_odd_double() {
        if (order_ % 4 != 2 || order_ == 2) return false;
        i64 m = order_ / 2;
        i64 h = (m + 1) / 2;
        std::map<i64, mpq_class> acc;
        for (auto& [e, c] : terms_) {
            i64 ne = mod_reduce(e * h, m);
            acc[ne] += (e & 1) ? -c : c;
        }
        order_ = m;
        terms_.clear();
        for (auto& [e, c] : acc)
            if (c != 0) terms_.emplace_back(e, c);
        return true;
    }

    bool phi_reduce() {
        if (terms_.empty()) return false;
        const auto& phi = detail::cyclotomic_info(order_);
        if (terms_.back().first < phi.degree) return false;
        mpz_class den = 1;
        for (auto& [e, c] : terms_) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
        std::vector<mpz_class> r(static_cast<size_t>(order_));
        for (auto& [e, c] : terms_) r[static_cast<size_t>(e)] += c.get_num() * (den / c.get_den());
        mpz_class c;
        for (i64 i = order_ - 1; i >= phi.degree; --i) {
            if (r[static_cast<size_t>(i)] == 0) continue;
            mpz_swap(c.get_mpz_t(), r[static_cast<size_t>(i)].get_mpz_t());
            r[static_cast<size_t>(i)] = 0;
            for (auto& [k, pk] : phi.tail) r[static_cast<size_t>(i - phi.degree + k)] -= c * pk;
        }
        terms_.clear();
        for (i64 e = 0; e < phi.degree; ++e)
            if (r[static_cast<size_t>(e)] != 0) {
                mpq_class q(r[static_cast<size_t>(e)], den);
                q.canonicalize();
                terms_.emplace_back(e, q);
            }
        return true;
    }
};

namespace detail {
inline const CycNum& sqrt_prime(i64 p) {
    static std::map<i64, CycNum> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
    CycNum v;
    if (p == 2) {
        v = CycNum::root(1, 8) + CycNum::root(7, 8);
    } else {
        std::vector<std::pair<i64, mpq_class>> terms;
        terms.reserve(static_cast<size_t>(p - 1));
        for (i64 x = 1; x < p; ++x) terms.emplace_back(x, mpq_class(kronecker(x, p)));
        CycNum g = CycNum::from_terms(p, std::move(terms));
        v = (p % 4 == 1) ? g : CycNum::root(3, 4) * g;  // sqrt(p) = -i * (i*sqrt(p))
    }
    auto [pos, ok] = cache.emplace(p, std::move(v));
    (void)ok;
    return pos->second;
}
}  // namespace detail

// The positive square root of n as an exact cyclotomic number, built
// multiplicatively from prime factors via quadratic Gauss sums.
inline CycNum sqrt_int(i64 n) {
    if (n < 1) throw std::domain_error("sqrt_int: argument must be positive");
    CycNum r = CycNum::from_int(1);
    mpz_class intpart = 1;
    for (auto& [p, k] : factorize(n)) {
        for (int i = 0; i < k / 2; ++i) intpart *= p;
        if (k % 2 == 1) r = r * detail::sqrt_prime(p);
    }
    return r.scaled(mpq_class(intpart));
}

// 1/sqrt(n) = sqrt(n)/n, exact.
inline CycNum inv_sqrt_int(i64 n) { return sqrt_int(n).scaled(mpq_class(1, n)); }

}  // namespace fqgauss
