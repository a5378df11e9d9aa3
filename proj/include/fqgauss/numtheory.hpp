#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fqgauss {

using i64 = long;

inline i64 mod_reduce(i64 a, i64 n) {
    i64 r = a % n;
    return r < 0 ? r + n : r;
}

inline i64 mul_mod(i64 a, i64 b, i64 n) {
    return static_cast<i64>((static_cast<__int128>(a) * b) % n);
}

inline i64 pow_mod(i64 a, i64 e, i64 n) {
    a = mod_reduce(a, n);
    i64 r = n == 1 ? 0 : 1;
    while (e > 0) {
        if (e & 1) r = mul_mod(r, a, n);
        a = mul_mod(a, a, n);
        e >>= 1;
    }
    return r;
}

// Inverse of a modulo n; requires gcd(a, n) = 1.
inline i64 inv_mod(i64 a, i64 n) {
    if (n <= 0) throw std::domain_error("inv_mod: modulus must be positive");
    i64 r0 = n, r1 = mod_reduce(a, n);
    i64 t0 = 0, t1 = 1;
    while (r1 != 0) {
        i64 q = r0 / r1;
        r0 -= q * r1;
        std::swap(r0, r1);
        t0 -= q * t1;
        std::swap(t0, t1);
    }
    if (r0 != 1) throw std::domain_error("inv_mod: " + std::to_string(a) + " is not a unit mod " + std::to_string(n));
    return mod_reduce(t0, n);
}

// Kronecker symbol (a|n), extending the Legendre and Jacobi symbols.
inline int kronecker(i64 a, i64 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) result = -result;
    }
    int twos = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++twos;
    }
    if (twos > 0) {
        if (a % 2 == 0) return 0;
        // (a|2) = 1 if a ≡ ±1 (8), -1 if a ≡ ±3 (8)
        i64 am8 = mod_reduce(a, 8);
        if ((twos & 1) && (am8 == 3 || am8 == 5)) result = -result;
    }
    a = mod_reduce(a, n);
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            i64 nm8 = n % 8;
            if (nm8 == 3 || nm8 == 5) result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

inline std::vector<std::pair<i64, int>> factorize(i64 n) {
    if (n <= 0) throw std::domain_error("factorize: argument must be positive");
    std::vector<std::pair<i64, int>> f;
    for (i64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            int k = 0;
            while (n % p == 0) {
                n /= p;
                ++k;
            }
            f.emplace_back(p, k);
        }
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

inline bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

inline bool is_prime_power(i64 n, i64* p_out = nullptr, int* k_out = nullptr) {
    if (n < 2) return false;
    auto f = factorize(n);
    if (f.size() != 1) return false;
    if (p_out) *p_out = f[0].first;
    if (k_out) *k_out = f[0].second;
    return true;
}

// Least positive quadratic non-residue mod an odd prime p.
inline i64 least_nonresidue(i64 p) {
    for (i64 a = 2; a < p; ++a)
        if (kronecker(a, p) == -1) return a;
    throw std::domain_error("least_nonresidue: no non-residue mod " + std::to_string(p));
}

// Least positive square root of -1 mod p (requires p ≡ 1 mod 4).
inline i64 sqrt_minus_one(i64 p) {
    for (i64 d = 2; d < p; ++d)
        if (mul_mod(d, d, p) == p - 1) return d;
    throw std::domain_error("sqrt_minus_one: -1 is not a square mod " + std::to_string(p));
}

// Least positive solution of d^2 - d + 1 = 0 mod p, i.e. a primitive 6th
// root of unity in F_p (requires p ≡ 1 mod 3).
inline i64 primitive_sixth_root(i64 p) {
    for (i64 d = 2; d < p; ++d)
        if (mod_reduce(d * d - d + 1, p) == 0) return d;
    throw std::domain_error("primitive_sixth_root: none mod " + std::to_string(p));
}

}  // namespace fqgauss
