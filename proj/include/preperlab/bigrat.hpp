#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>

namespace preperlab {

// log|z| for a nonzero integer, safe for operands far beyond double range.
double log_mpz(const mpz_class& z);

/*
 * Arbitrary-precision rational, always kept in lowest terms with positive
 * denominator (mpq canonical form).  Canonical text form is "num/den", with
 * the "/den" part omitted when the denominator is 1.
 */
class BigRat {
public:
    BigRat() : q_(0) {}
    BigRat(int n) : q_(n) {}
    BigRat(long n) : q_(static_cast<signed long>(n)) {}
    BigRat(long n, long d);
    BigRat(const mpz_class& n, const mpz_class& d);
    explicit BigRat(const mpz_class& n) : q_(n) {}
    explicit BigRat(const mpq_class& q) : q_(q) { q_.canonicalize(); }

    // Accepts "a", "a/b" and plain decimal strings like "-0.25".
    static BigRat parse(const std::string& text);

    const mpq_class& raw() const { return q_; }
    mpz_class num() const { return q_.get_num(); }
    mpz_class den() const { return q_.get_den(); }

    bool is_zero() const { return sgn(q_) == 0; }
    bool is_integer() const { return q_.get_den() == 1; }
    int sign() const { return sgn(q_); }

    BigRat abs() const;
    BigRat reciprocal() const;   // throws on zero
    BigRat pow(long e) const;    // integer exponent, negative allowed (nonzero base)

    double to_double() const { return q_.get_d(); }
    double log_abs() const;      // log|x|, exact integer logs; x must be nonzero

    std::string str() const;

    BigRat operator-() const { return BigRat(mpq_class(-q_)); }
    BigRat& operator+=(const BigRat& o) { q_ += o.q_; return *this; }
    BigRat& operator-=(const BigRat& o) { q_ -= o.q_; return *this; }
    BigRat& operator*=(const BigRat& o) { q_ *= o.q_; return *this; }
    BigRat& operator/=(const BigRat& o);

    friend BigRat operator+(BigRat a, const BigRat& b) { a += b; return a; }
    friend BigRat operator-(BigRat a, const BigRat& b) { a -= b; return a; }
    friend BigRat operator*(BigRat a, const BigRat& b) { a *= b; return a; }
    friend BigRat operator/(BigRat a, const BigRat& b) { a /= b; return a; }

    friend bool operator==(const BigRat& a, const BigRat& b) { return a.q_ == b.q_; }
    friend bool operator!=(const BigRat& a, const BigRat& b) { return a.q_ != b.q_; }
    friend bool operator<(const BigRat& a, const BigRat& b) { return a.q_ < b.q_; }
    friend bool operator<=(const BigRat& a, const BigRat& b) { return a.q_ <= b.q_; }
    friend bool operator>(const BigRat& a, const BigRat& b) { return a.q_ > b.q_; }
    friend bool operator>=(const BigRat& a, const BigRat& b) { return a.q_ >= b.q_; }

private:
    mpq_class q_;
};

std::ostream& operator<<(std::ostream& os, const BigRat& x);

}  // namespace preperlab
