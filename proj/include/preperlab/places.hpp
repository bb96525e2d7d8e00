#pragma once

#include <stdexcept>
#include <string>

#include "preperlab/bigrat.hpp"
#include "preperlab/lognumber.hpp"

namespace preperlab {

// Refused domain precondition (maps to CLI exit 3).
class precondition_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iteration/convergence cap exceeded (maps to CLI exit 4).
class cap_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/*
 * A place of Q: the archimedean absolute value or a p-adic one.  Over Q every
 * local degree is 1 and the finite place p carries weight log p.
 */
struct Place {
    enum class Kind { Arch, Finite };
    Kind kind = Kind::Arch;
    unsigned long long p = 0;

    static Place archimedean() { return Place{Kind::Arch, 0}; }
    static Place finite(unsigned long long prime);  // validates primality

    bool is_arch() const { return kind == Kind::Arch; }
    std::string str() const;

    friend bool operator==(const Place& a, const Place& b) {
        return a.kind == b.kind && a.p == b.p;
    }
    friend bool operator<(const Place& a, const Place& b) {
        if (a.kind != b.kind) return a.kind == Place::Kind::Finite;  // primes first, arch last
        return a.p < b.p;
    }
};

/*
 * p-adic valuation value with a dedicated +infinity (valuation of 0).  Only
 * comparisons are allowed on the sentinel; adding infinities throws.
 */
class PadicValuation {
public:
    static PadicValuation infinite() { PadicValuation v; v.inf_ = true; return v; }
    static PadicValuation of(long long v) { PadicValuation r; r.v_ = v; return r; }

    bool is_infinite() const { return inf_; }
    long long value() const;  // throws on the sentinel

    PadicValuation operator+(const PadicValuation& o) const;

    friend bool operator==(const PadicValuation& a, const PadicValuation& b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
    }
    friend bool operator!=(const PadicValuation& a, const PadicValuation& b) { return !(a == b); }
    friend bool operator<(const PadicValuation& a, const PadicValuation& b) {
        if (a.inf_) return false;
        if (b.inf_) return true;
        return a.v_ < b.v_;
    }
    friend bool operator<=(const PadicValuation& a, const PadicValuation& b) {
        return a == b || a < b;
    }
    friend bool operator>(const PadicValuation& a, const PadicValuation& b) { return b < a; }
    friend bool operator>=(const PadicValuation& a, const PadicValuation& b) { return b <= a; }

    std::string str() const;

private:
    bool inf_ = false;
    long long v_ = 0;
};

PadicValuation valuation(const BigRat& x, unsigned long long p);

// log^+ |x|_v = log max{1, |x|_v}; exact finite term at finite places.
LogNumber log_plus(const BigRat& x, const Place& v);

// sum over all places of log|x|_v for nonzero x; zero up to rounding.
double product_formula_residual(const BigRat& x);

// Weil height of a rational number: log max(|num|, den).
double height(const BigRat& x);

}  // namespace preperlab
