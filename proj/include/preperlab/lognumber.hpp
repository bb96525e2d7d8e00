#pragma once

#include <map>
#include <string>

#include "preperlab/bigrat.hpp"

namespace preperlab {

/*
 * Formal real number of the shape
 *
 *     arch + sum_p q_p * log p
 *
 * with exact rational exponents q_p keyed by prime, plus one floating
 * archimedean term.  The finite part supports exact addition, subtraction and
 * rational scaling; zero exponents are never stored.  real() evaluates the
 * whole thing in double precision.
 */
class LogNumber {
public:
    LogNumber() = default;

    static LogNumber zero() { return LogNumber(); }
    static LogNumber from_prime(unsigned long long p, const BigRat& exponent);
    static LogNumber from_arch(double a);

    const std::map<unsigned long long, BigRat>& finite_terms() const { return finite_; }
    double arch() const { return arch_; }

    BigRat finite_exponent(unsigned long long p) const;  // 0 if absent
    bool finite_is_zero() const { return finite_.empty(); }
    bool is_exact_zero() const { return finite_.empty() && arch_ == 0.0; }

    double real() const;

    LogNumber& operator+=(const LogNumber& o);
    LogNumber& operator-=(const LogNumber& o);
    LogNumber operator-() const;
    LogNumber scaled(const BigRat& s) const;

    friend LogNumber operator+(LogNumber a, const LogNumber& b) { a += b; return a; }
    friend LogNumber operator-(LogNumber a, const LogNumber& b) { a -= b; return a; }
    friend bool operator==(const LogNumber& a, const LogNumber& b) {
        return a.finite_ == b.finite_ && a.arch_ == b.arch_;
    }

    std::string str() const;

private:
    void strip_zeros();

    std::map<unsigned long long, BigRat> finite_;
    double arch_ = 0.0;
};

}  // namespace preperlab
