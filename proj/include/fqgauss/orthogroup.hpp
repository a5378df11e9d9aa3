#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fqgauss/fqm.hpp"

namespace fqgauss {

// A group automorphism candidate in matrix form: column j is the image of
// generator e_j, entries reduced mod the target orders.
struct Isometry {
    int r = 0;
    std::vector<i64> m;  // row-major, m[i*r+j]

    i64 entry(int i, int j) const { return m[static_cast<size_t>(i) * r + j]; }
    bool operator==(const Isometry& o) const { return r == o.r && m == o.m; }
};

inline Element apply(const FqForm& A, const Isometry& g, const Element& x) {
    const int r = A.rank();
    Element y = A.zero();
    for (int i = 0; i < r; ++i) {
        i64 s = 0;
        for (int j = 0; j < r; ++j) s += g.m[static_cast<size_t>(i) * r + j] * x.c[static_cast<size_t>(j)];
        y.c[static_cast<size_t>(i)] = mod_reduce(s, A.orders()[static_cast<size_t>(i)]);
    }
    return y;
}

inline Isometry identity_isometry(const FqForm& A) {
    const int r = A.rank();
    Isometry g;
    g.r = r;
    g.m.assign(static_cast<size_t>(r) * r, 0);
    for (int i = 0; i < r; ++i) g.m[static_cast<size_t>(i) * r + i] = 1;
    return g;
}

inline Isometry neg_identity(const FqForm& A) {
    const int r = A.rank();
    Isometry g;
    g.r = r;
    g.m.assign(static_cast<size_t>(r) * r, 0);
    for (int i = 0; i < r; ++i)
        g.m[static_cast<size_t>(i) * r + i] = A.orders()[static_cast<size_t>(i)] - 1;
    return g;
}

// g ∘ h (apply h first).
inline Isometry compose(const FqForm& A, const Isometry& g, const Isometry& h) {
    const int r = A.rank();
    Isometry f;
    f.r = r;
    f.m.assign(static_cast<size_t>(r) * r, 0);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            i64 s = 0;
            for (int k = 0; k < r; ++k)
                s += g.m[static_cast<size_t>(i) * r + k] * h.m[static_cast<size_t>(k) * r + j];
            f.m[static_cast<size_t>(i) * r + j] = mod_reduce(s, A.orders()[static_cast<size_t>(i)]);
        }
    return f;
}

inline Isometry isometry_direct_sum(const FqForm& A, const FqForm& B, const Isometry& gA, const Isometry& gB) {
    const int ra = A.rank(), rb = B.rank(), r = ra + rb;
    Isometry f;
    f.r = r;
    f.m.assign(static_cast<size_t>(r) * r, 0);
    for (int i = 0; i < ra; ++i)
        for (int j = 0; j < ra; ++j) f.m[static_cast<size_t>(i) * r + j] = gA.m[static_cast<size_t>(i) * ra + j];
    for (int i = 0; i < rb; ++i)
        for (int j = 0; j < rb; ++j)
            f.m[static_cast<size_t>(ra + i) * r + (ra + j)] = gB.m[static_cast<size_t>(i) * rb + j];
    return f;
}

// Full check on all elements; intended for tests and validation at small sizes.
inline bool is_isometry(const FqForm& A, const Isometry& g, const Config& cfg = default_config()) {
    if (g.r != A.rank()) return false;
    const int r = A.rank();
    // Well-defined as a homomorphism: n_j * (image of e_j) must vanish.
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < r; ++i)
            if (mod_reduce(A.orders()[static_cast<size_t>(j)] * g.entry(i, j), A.orders()[static_cast<size_t>(i)]) != 0)
                return false;
    const i64 n = A.group_order();
    if (n > cfg.max_order) throw CapExceeded("is_isometry cap exceeded", cfg.max_order, n);
    std::vector<bool> hit(static_cast<size_t>(n), false);
    bool ok = true;
    A.for_each_element(
        [&](const Element& x) {
            if (!ok) return;
            Element y = apply(A, g, x);
            i64 idx = A.index_of(y);
            if (hit[static_cast<size_t>(idx)]) ok = false;
            hit[static_cast<size_t>(idx)] = true;
            if (A.q_of(y) != A.q_of(x)) ok = false;
        },
        cfg);
    return ok;
}

// The full list of isometries of A. Stored in a compact pool; entries fit a
// byte whenever every order does.
class IsomGroup {
  public:
    IsomGroup() = default;
    explicit IsomGroup(const FqForm& A) : r_(A.rank()), orders_(A.orders()) {
        use8_ = true;
        for (i64 o : orders_)
            if (o > 255) use8_ = false;
    }

    size_t size() const { return count_; }
    int rank() const { return r_; }
    const std::vector<i64>& orders() const { return orders_; }

    void append(const std::vector<i64>& mat) {
        if (use8_)
            for (i64 v : mat) pool8_.push_back(static_cast<uint8_t>(v));
        else
            for (i64 v : mat) pool64_.push_back(v);
        ++count_;
    }

    void append(const Isometry& g) { append(g.m); }

    Isometry at(size_t gidx) const {
        Isometry g;
        g.r = r_;
        const size_t s = static_cast<size_t>(r_) * r_;
        g.m.resize(s);
        if (use8_)
            for (size_t t = 0; t < s; ++t) g.m[t] = pool8_[gidx * s + t];
        else
            for (size_t t = 0; t < s; ++t) g.m[t] = pool64_[gidx * s + t];
        return g;
    }

    bool contains(const Isometry& g) const {
        if (g.r != r_) return false;
        const size_t s = static_cast<size_t>(r_) * r_;
        for (size_t i = 0; i < count_; ++i) {
            bool eq = true;
            for (size_t t = 0; t < s && eq; ++t) {
                i64 v = use8_ ? static_cast<i64>(pool8_[i * s + t]) : pool64_[i * s + t];
                if (v != g.m[t]) eq = false;
            }
            if (eq) return true;
        }
        return false;
    }

    bool narrow() const { return use8_; }
    const uint8_t* pool8() const { return pool8_.data(); }
    const i64* pool64() const { return pool64_.data(); }

  private:
    int r_ = 0;
    std::vector<i64> orders_;
    size_t count_ = 0;
    bool use8_ = true;
    std::vector<uint8_t> pool8_;
    std::vector<i64> pool64_;
};

namespace detail {

// Affine solution space of a linear system over F_p.
struct AffineSpace {
    std::vector<i64> x0;
    std::vector<std::vector<i64>> basis;
};

inline std::optional<AffineSpace> solve_affine_mod_p(std::vector<std::vector<i64>> rows, std::vector<i64> rhs,
                                                     i64 p, int m) {
    const int nrows = static_cast<int>(rows.size());
    int rank = 0;
    std::vector<int> pivot_col;
    for (int col = 0; col < m && rank < nrows; ++col) {
        int sel = -1;
        for (int i = rank; i < nrows; ++i)
            if (rows[static_cast<size_t>(i)][static_cast<size_t>(col)] != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        std::swap(rows[static_cast<size_t>(sel)], rows[static_cast<size_t>(rank)]);
        std::swap(rhs[static_cast<size_t>(sel)], rhs[static_cast<size_t>(rank)]);
        i64 inv = inv_mod(rows[static_cast<size_t>(rank)][static_cast<size_t>(col)], p);
        for (int c = col; c < m; ++c)
            rows[static_cast<size_t>(rank)][static_cast<size_t>(c)] =
                mod_reduce(rows[static_cast<size_t>(rank)][static_cast<size_t>(c)] * inv, p);
        rhs[static_cast<size_t>(rank)] = mod_reduce(rhs[static_cast<size_t>(rank)] * inv, p);
        for (int i = 0; i < nrows; ++i) {
            if (i == rank) continue;
            i64 f = rows[static_cast<size_t>(i)][static_cast<size_t>(col)];
            if (f == 0) continue;
            for (int c = col; c < m; ++c)
                rows[static_cast<size_t>(i)][static_cast<size_t>(c)] = mod_reduce(
                    rows[static_cast<size_t>(i)][static_cast<size_t>(c)] - f * rows[static_cast<size_t>(rank)][static_cast<size_t>(c)], p);
            rhs[static_cast<size_t>(i)] = mod_reduce(rhs[static_cast<size_t>(i)] - f * rhs[static_cast<size_t>(rank)], p);
        }
        pivot_col.push_back(col);
        ++rank;
    }
    for (int i = rank; i < nrows; ++i)
        if (rhs[static_cast<size_t>(i)] != 0) return std::nullopt;

    AffineSpace s;
    s.x0.assign(static_cast<size_t>(m), 0);
    std::vector<bool> is_pivot(static_cast<size_t>(m), false);
    for (int i = 0; i < rank; ++i) {
        s.x0[static_cast<size_t>(pivot_col[static_cast<size_t>(i)])] = rhs[static_cast<size_t>(i)];
        is_pivot[static_cast<size_t>(pivot_col[static_cast<size_t>(i)])] = true;
    }
    for (int f = 0; f < m; ++f) {
        if (is_pivot[static_cast<size_t>(f)]) continue;
        std::vector<i64> b(static_cast<size_t>(m), 0);
        b[static_cast<size_t>(f)] = 1;
        for (int i = 0; i < rank; ++i)
            b[static_cast<size_t>(pivot_col[static_cast<size_t>(i)])] =
                mod_reduce(-rows[static_cast<size_t>(i)][static_cast<size_t>(f)], p);
        s.basis.push_back(std::move(b));
    }
    return s;
}

// Search for the isometries of a p-elementary form via per-level affine
// pruning: the pairing constraints against already-chosen images cut the
// candidate set to an affine subspace, which is then filtered by the exact
// q-value table.
inline void elementary_group_search(const FqForm& A, i64 p, IsomGroup& out, i64 budget) {
    const int m = A.rank();
    const i64 D = (p == 2) ? 4 : p;
    const i64 n = A.group_order();

    // Scaled Gram matrix over F_p and q-codes (q = code / D).
    std::vector<std::vector<i64>> gram(static_cast<size_t>(m), std::vector<i64>(static_cast<size_t>(m)));
    std::vector<i64> tcode(static_cast<size_t>(m));  // D * q(e_i) mod D
    std::vector<std::vector<i64>> scode(static_cast<size_t>(m), std::vector<i64>(static_cast<size_t>(m), 0));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            mpq_class v = A.gen_pair(i, j) * p;
            gram[static_cast<size_t>(i)][static_cast<size_t>(j)] = mod_reduce(static_cast<i64>(v.get_num().get_si()), p);
        }
        mpq_class t = A.gen_q(i) * D;
        tcode[static_cast<size_t>(i)] = mod_reduce(static_cast<i64>(t.get_num().get_si()), D);
        for (int j = i + 1; j < m; ++j) {
            mpq_class sv = A.gen_pair(i, j) * D;
            scode[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                mod_reduce(static_cast<i64>(sv.get_num().get_si()), D);
        }
    }

    // q-code table over all elements, indexed mixed-radix.
    std::vector<uint16_t> qtab(static_cast<size_t>(n));
    {
        std::vector<i64> x(static_cast<size_t>(m), 0);
        for (i64 idx = 0; idx < n; ++idx) {
            i64 code = 0;
            for (int i = 0; i < m; ++i) {
                if (x[static_cast<size_t>(i)] == 0) continue;
                code += x[static_cast<size_t>(i)] * x[static_cast<size_t>(i)] * tcode[static_cast<size_t>(i)];
                for (int j = i + 1; j < m; ++j)
                    code += x[static_cast<size_t>(i)] * x[static_cast<size_t>(j)] * scode[static_cast<size_t>(i)][static_cast<size_t>(j)];
            }
            qtab[static_cast<size_t>(idx)] = static_cast<uint16_t>(mod_reduce(code, D));
            for (int i = m; i-- > 0;) {
                if (++x[static_cast<size_t>(i)] < p) break;
                x[static_cast<size_t>(i)] = 0;
            }
        }
    }

    // Level-0 bucket.
    std::vector<i64> bucket0;
    for (i64 idx = 0; idx < n; ++idx)
        if (qtab[static_cast<size_t>(idx)] == tcode[0]) bucket0.push_back(idx);

    std::vector<std::vector<i64>> img(static_cast<size_t>(m));  // digit vectors
    std::vector<i64> mat(static_cast<size_t>(m) * m);
    i64 used = 0;

    auto digits_of = [&](i64 idx) {
        std::vector<i64> d(static_cast<size_t>(m));
        for (int i = m; i-- > 0;) {
            d[static_cast<size_t>(i)] = idx % p;
            idx /= p;
        }
        return d;
    };
    auto index_of_digits = [&](const std::vector<i64>& d) {
        i64 idx = 0;
        for (int i = 0; i < m; ++i) idx = idx * p + d[static_cast<size_t>(i)];
        return idx;
    };
    auto gram_vec = [&](const std::vector<i64>& v) {
        std::vector<i64> w(static_cast<size_t>(m), 0);
        for (int i = 0; i < m; ++i) {
            i64 s = 0;
            for (int j = 0; j < m; ++j) s += gram[static_cast<size_t>(i)][static_cast<size_t>(j)] * v[static_cast<size_t>(j)];
            w[static_cast<size_t>(i)] = mod_reduce(s, p);
        }
        return w;
    };

    std::function<void(int)> dfs = [&](int level) {
        if (level == m) {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    mat[static_cast<size_t>(i) * m + j] = img[static_cast<size_t>(j)][static_cast<size_t>(i)];
            out.append(mat);
            return;
        }
        if (level == 0) {
            for (i64 idx : bucket0) {
                if (++used > budget) throw BudgetExceeded(budget);
                img[0] = digits_of(idx);
                dfs(1);
            }
            return;
        }
        // Pairing constraints against previous images.
        std::vector<std::vector<i64>> rows;
        std::vector<i64> rhs;
        for (int i = 0; i < level; ++i) {
            rows.push_back(gram_vec(img[static_cast<size_t>(i)]));
            rhs.push_back(gram[static_cast<size_t>(level)][static_cast<size_t>(i)]);
        }
        auto space = solve_affine_mod_p(std::move(rows), std::move(rhs), p, m);
        if (!space) return;
        const int d = static_cast<int>(space->basis.size());
        std::vector<i64> counter(static_cast<size_t>(d), 0);
        std::vector<i64> y = space->x0;
        const i64 want = tcode[static_cast<size_t>(level)];
        while (true) {
            if (++used > budget) throw BudgetExceeded(budget);
            i64 idx = index_of_digits(y);
            if (qtab[static_cast<size_t>(idx)] == want) {
                img[static_cast<size_t>(level)] = y;
                dfs(level + 1);
            }
            int t = d - 1;
            for (; t >= 0; --t) {
                ++counter[static_cast<size_t>(t)];
                for (int i = 0; i < m; ++i)
                    y[static_cast<size_t>(i)] =
                        mod_reduce(y[static_cast<size_t>(i)] + space->basis[static_cast<size_t>(t)][static_cast<size_t>(i)], p);
                if (counter[static_cast<size_t>(t)] < p) break;
                counter[static_cast<size_t>(t)] = 0;
            }
            if (t < 0) break;
        }
    };
    dfs(0);
}

}  // namespace detail

// Complete enumeration of O(A) by generator-image search with pruning.
inline IsomGroup orthogonal_group(const FqForm& A, const Config& cfg = default_config()) {
    if (!A.is_nondegenerate(cfg)) throw std::invalid_argument("orthogonal_group: degenerate form");
    IsomGroup G(A);
    const int r = A.rank();
    if (r == 0) {
        G.append(identity_isometry(A));
        return G;
    }
    A.check_enumerable(cfg);

    i64 p0 = A.orders()[0];
    bool elementary = is_prime(p0) && A.is_p_elementary(p0);
    if (elementary) {
        detail::elementary_group_search(A, p0, G, cfg.search_budget);
        return G;
    }

    const i64 n = A.group_order();
    std::vector<Element> elems = A.all_elements(cfg);
    std::vector<ResidueQZ> qv(static_cast<size_t>(n));
    std::vector<i64> ordv(static_cast<size_t>(n));
    for (i64 i = 0; i < n; ++i) {
        qv[static_cast<size_t>(i)] = A.q_of(elems[static_cast<size_t>(i)]);
        ordv[static_cast<size_t>(i)] = A.element_order(elems[static_cast<size_t>(i)]);
    }

    // Candidate bucket per generator: order divides n_j and q matches.
    std::vector<std::vector<i64>> bucket(static_cast<size_t>(r));
    for (int j = 0; j < r; ++j) {
        Element ej = A.zero();
        ej.c[static_cast<size_t>(j)] = 1;
        ResidueQZ qj = A.q_of(ej);
        i64 nj = A.orders()[static_cast<size_t>(j)];
        for (i64 i = 0; i < n; ++i)
            if (nj % ordv[static_cast<size_t>(i)] == 0 && qv[static_cast<size_t>(i)] == qj)
                bucket[static_cast<size_t>(j)].push_back(i);
    }

    std::vector<i64> img(static_cast<size_t>(r));
    std::vector<i64> mat(static_cast<size_t>(r) * r);
    i64 used = 0;

    std::function<void(int)> dfs = [&](int level) {
        if (level == r) {
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j)
                    mat[static_cast<size_t>(i) * r + j] = elems[static_cast<size_t>(img[static_cast<size_t>(j)])].c[static_cast<size_t>(i)];
            G.append(mat);
            return;
        }
        Element ej = A.zero();
        ej.c[static_cast<size_t>(level)] = 1;
        for (i64 cand : bucket[static_cast<size_t>(level)]) {
            if (++used > cfg.search_budget) throw BudgetExceeded(cfg.search_budget);
            bool ok = true;
            for (int i = 0; i < level && ok; ++i) {
                Element ei = A.zero();
                ei.c[static_cast<size_t>(i)] = 1;
                if (A.pair(elems[static_cast<size_t>(cand)], elems[static_cast<size_t>(img[static_cast<size_t>(i)])]) !=
                    A.pair(ej, ei))
                    ok = false;
            }
            if (!ok) continue;
            img[static_cast<size_t>(level)] = cand;
            dfs(level + 1);
        }
    };
    dfs(0);
    return G;
}

// Closure of the given generators inside G under composition.
inline IsomGroup subgroup_from_generators(const FqForm& A, const IsomGroup& G,
                                          const std::vector<Isometry>& gens) {
    for (auto& g : gens)
        if (!G.contains(g)) throw std::invalid_argument("subgroup_from_generators: generator is not an isometry of the group");
    IsomGroup H(A);
    std::map<std::vector<i64>, bool> seen;
    std::vector<Isometry> frontier;
    Isometry id = identity_isometry(A);
    seen[id.m] = true;
    frontier.push_back(id);
    H.append(id);
    while (!frontier.empty()) {
        std::vector<Isometry> next;
        for (auto& h : frontier)
            for (auto& g : gens) {
                Isometry f = compose(A, g, h);
                if (!seen.count(f.m)) {
                    seen[f.m] = true;
                    H.append(f);
                    next.push_back(f);
                }
            }
        frontier = std::move(next);
    }
    return H;
}

// Decomposition of A into Γ-orbits; representatives are the lexicographically
// least elements (equivalently, least mixed-radix index).
struct OrbitPartition {
    std::vector<int32_t> orbit_of;                 // element index -> orbit id
    std::vector<std::vector<i64>> orbit_elements;  // sorted element indices
    std::vector<i64> reps;                         // representative index per orbit
};

inline OrbitPartition orbits(const FqForm& A, const IsomGroup& G, const Config& cfg = default_config()) {
    A.check_enumerable(cfg);
    const i64 n = A.group_order();
    const int r = A.rank();
    const size_t gs = G.size();
    OrbitPartition P;
    P.orbit_of.assign(static_cast<size_t>(n), -1);
    if (r == 0) {
        P.orbit_of[0] = 0;
        P.orbit_elements.push_back({0});
        P.reps.push_back(0);
        return P;
    }
    const size_t stride = static_cast<size_t>(r) * r;
    const auto& ords = A.orders();
    std::vector<i64> x(static_cast<size_t>(r)), y(static_cast<size_t>(r));
    for (i64 seed = 0; seed < n; ++seed) {
        if (P.orbit_of[static_cast<size_t>(seed)] != -1) continue;
        const int32_t id = static_cast<int32_t>(P.reps.size());
        // digits of seed
        i64 tmp = seed;
        for (int i = r; i-- > 0;) {
            x[static_cast<size_t>(i)] = tmp % ords[static_cast<size_t>(i)];
            tmp /= ords[static_cast<size_t>(i)];
        }
        std::vector<i64> members;
        if (G.narrow()) {
            const uint8_t* pool = G.pool8();
            for (size_t g = 0; g < gs; ++g) {
                const uint8_t* mg = pool + g * stride;
                i64 idx = 0;
                for (int i = 0; i < r; ++i) {
                    i64 s = 0;
                    for (int j = 0; j < r; ++j) s += static_cast<i64>(mg[static_cast<size_t>(i) * r + j]) * x[static_cast<size_t>(j)];
                    idx = idx * ords[static_cast<size_t>(i)] + (s % ords[static_cast<size_t>(i)]);
                }
                if (P.orbit_of[static_cast<size_t>(idx)] != id) {
                    P.orbit_of[static_cast<size_t>(idx)] = id;
                    members.push_back(idx);
                }
            }
        } else {
            const i64* pool = G.pool64();
            for (size_t g = 0; g < gs; ++g) {
                const i64* mg = pool + g * stride;
                i64 idx = 0;
                for (int i = 0; i < r; ++i) {
                    i64 s = 0;
                    for (int j = 0; j < r; ++j) s += mg[static_cast<size_t>(i) * r + j] * x[static_cast<size_t>(j)];
                    idx = idx * ords[static_cast<size_t>(i)] + (s % ords[static_cast<size_t>(i)]);
                }
                if (P.orbit_of[static_cast<size_t>(idx)] != id) {
                    P.orbit_of[static_cast<size_t>(idx)] = id;
                    members.push_back(idx);
                }
            }
        }
        std::sort(members.begin(), members.end());
        P.reps.push_back(members.front());
        P.orbit_elements.push_back(std::move(members));
    }
    return P;
}

// The unique x_A with (x, x_A) = (x, x) mod Z for all x in a nondegenerate
// 2-elementary form; zero exactly when the form is special.
inline Element characteristic_element(const FqForm& A) {
    if (!A.is_2elementary() && A.rank() != 0)
        throw std::invalid_argument("characteristic_element: form is not 2-elementary");
    if (A.rank() == 0) return A.zero();
    std::optional<Element> found;
    int count = 0;
    A.for_each_element([&](const Element& cand) {
        bool ok = true;
        for (int i = 0; i < A.rank() && ok; ++i) {
            Element ei = A.zero();
            ei.c[static_cast<size_t>(i)] = 1;
            if (A.pair(ei, cand) != A.norm2(ei).mod_z()) ok = false;
        }
        if (ok) {
            found = cand;
            ++count;
        }
    });
    if (count != 1) throw std::invalid_argument("characteristic_element: input is degenerate");
    return *found;
}

// A hyperbolic pair (q(x) = q(y) = 0, (x,y) = 1/2) spanning a U-summand, if
// one exists.
inline std::optional<std::pair<Element, Element>> contains_U_summand(const FqForm& A) {
    if (!A.is_2elementary()) throw std::invalid_argument("contains_U_summand: form is not 2-elementary");
    std::vector<Element> iso;
    A.for_each_element([&](const Element& x) {
        if (!x.is_zero() && A.q_of(x).is_zero()) iso.push_back(x);
    });
    const ResidueQZ half = ResidueQZ::frac(1, 2);
    for (size_t i = 0; i < iso.size(); ++i)
        for (size_t j = i + 1; j < iso.size(); ++j)
            if (A.pair(iso[i], iso[j]) == half) return std::make_pair(iso[i], iso[j]);
    return std::nullopt;
}

// Brute-force isometry search between two nondegenerate forms (tests and
// validation).
inline std::optional<Isometry> find_isometry(const FqForm& A, const FqForm& B,
                                             const Config& cfg = default_config()) {
    if (A.group_order() != B.group_order()) return std::nullopt;
    if (!A.is_nondegenerate(cfg) || !B.is_nondegenerate(cfg))
        throw std::invalid_argument("find_isometry: degenerate input");
    const int r = A.rank();
    if (r == 0) return identity_isometry(A);
    B.check_enumerable(cfg);
    const i64 n = B.group_order();
    std::vector<Element> elems = B.all_elements(cfg);
    std::vector<std::vector<i64>> bucket(static_cast<size_t>(r));
    for (int j = 0; j < r; ++j) {
        Element ej = A.zero();
        ej.c[static_cast<size_t>(j)] = 1;
        ResidueQZ qj = A.q_of(ej);
        i64 nj = A.orders()[static_cast<size_t>(j)];
        for (i64 i = 0; i < n; ++i)
            if (nj % B.element_order(elems[static_cast<size_t>(i)]) == 0 &&
                B.q_of(elems[static_cast<size_t>(i)]) == qj)
                bucket[static_cast<size_t>(j)].push_back(i);
    }
    std::vector<i64> img(static_cast<size_t>(r));
    i64 used = 0;
    std::optional<Isometry> result;
    std::function<bool(int)> dfs = [&](int level) -> bool {
        if (level == r) {
            // A pairing- and q-preserving generator assignment between
            // nondegenerate forms of equal order is an isometry.
            Isometry g;
            g.r = r;
            g.m.assign(static_cast<size_t>(r) * r, 0);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j)
                    g.m[static_cast<size_t>(i) * r + j] = elems[static_cast<size_t>(img[static_cast<size_t>(j)])].c[static_cast<size_t>(i)];
            result = g;
            return true;
        }
        Element ej = A.zero();
        ej.c[static_cast<size_t>(level)] = 1;
        for (i64 cand : bucket[static_cast<size_t>(level)]) {
            if (++used > cfg.search_budget) throw BudgetExceeded(cfg.search_budget);
            bool ok = true;
            for (int i = 0; i < level && ok; ++i) {
                Element ei = A.zero();
                ei.c[static_cast<size_t>(i)] = 1;
                if (B.pair(elems[static_cast<size_t>(cand)], elems[static_cast<size_t>(img[static_cast<size_t>(i)])]) !=
                    A.pair(ej, ei))
                    ok = false;
            }
            if (!ok) continue;
            img[static_cast<size_t>(level)] = cand;
            if (dfs(level + 1)) return true;
        }
        return false;
    };
    dfs(0);
    return result;
}

}  // namespace fqgauss
