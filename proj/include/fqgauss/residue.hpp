#pragma once

#include <gmpxx.h>

#include <string>

#include "fqgauss/numtheory.hpp"

namespace fqgauss {

// Representative of v mod 1 in [0, 1).
inline mpq_class mod_one(const mpq_class& v) {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    mpq_class r = v - mpq_class(fl);
    r.canonicalize();
    return r;
}

// Representative of v mod 2 in [0, 2).
inline mpq_class mod_two(const mpq_class& v) {
    mpq_class half = v / 2;
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), half.get_num_mpz_t(), half.get_den_mpz_t());
    mpq_class r = v - 2 * mpq_class(fl);
    r.canonicalize();
    return r;
}

// An exact element of Q/Z.
class ResidueQZ {
  public:
    ResidueQZ() : v_(0) {}
    explicit ResidueQZ(const mpq_class& v) : v_(mod_one(v)) {}
    static ResidueQZ frac(i64 num, i64 den) { return ResidueQZ(mpq_class(num, den)); }

    const mpq_class& value() const { return v_; }  // in [0, 1)
    i64 num() const { return static_cast<i64>(v_.get_num().get_si()); }
    i64 den() const { return static_cast<i64>(v_.get_den().get_si()); }
    bool is_zero() const { return v_ == 0; }

    ResidueQZ operator+(const ResidueQZ& o) const { return ResidueQZ(v_ + o.v_); }
    ResidueQZ operator-(const ResidueQZ& o) const { return ResidueQZ(v_ - o.v_); }
    ResidueQZ operator-() const { return ResidueQZ(-v_); }
    ResidueQZ scaled(i64 c) const { return ResidueQZ(v_ * mpq_class(c)); }
    bool operator==(const ResidueQZ& o) const { return v_ == o.v_; }
    bool operator!=(const ResidueQZ& o) const { return v_ != o.v_; }

    std::string to_string() const { return v_.get_str(); }

  private:
    mpq_class v_;
};

// An exact element of Q/2Z.
class ResidueQ2Z {
  public:
    ResidueQ2Z() : v_(0) {}
    explicit ResidueQ2Z(const mpq_class& v) : v_(mod_two(v)) {}
    static ResidueQ2Z frac(i64 num, i64 den) { return ResidueQ2Z(mpq_class(num, den)); }

    const mpq_class& value() const { return v_; }  // in [0, 2)
    bool is_zero() const { return v_ == 0; }
    // Reduction Q/2Z -> Q/Z.
    ResidueQZ mod_z() const { return ResidueQZ(v_); }

    ResidueQ2Z operator+(const ResidueQ2Z& o) const { return ResidueQ2Z(v_ + o.v_); }
    ResidueQ2Z operator-() const { return ResidueQ2Z(-v_); }
    bool operator==(const ResidueQ2Z& o) const { return v_ == o.v_; }
    bool operator!=(const ResidueQ2Z& o) const { return v_ != o.v_; }

    std::string to_string() const { return v_.get_str(); }

  private:
    mpq_class v_;
};

}  // namespace fqgauss
