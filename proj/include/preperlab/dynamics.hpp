#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "preperlab/bigrat.hpp"
#include "preperlab/lognumber.hpp"
#include "preperlab/places.hpp"
#include "preperlab/polynomial.hpp"

namespace preperlab {

/*
 * The unicritical polynomial f(z) = z^d + c over Q.  Bad places are exactly
 * the primes dividing den(c), i.e. those with v_p(c) < 0.
 */
struct UnicriticalMap {
    int d = 2;
    BigRat c;
    std::vector<unsigned long long> bad_primes;  // ascending
    double h_c = 0.0;                            // height of c

    UnicriticalMap(int degree, BigRat param);

    BigRat apply(const BigRat& z) const;
    BigRat iterate(const BigRat& z, int times) const;
    bool is_bad(unsigned long long p) const;
    bool divides_degree(unsigned long long p) const { return static_cast<unsigned long long>(d) % p == 0; }
    long long vp_c(unsigned long long p) const;  // v_p(c); 0 when p is good for the search
    LogNumber lambda_c(const Place& v) const { return log_plus(c, v); }
};

/*
 * Search box for rational preperiodic points.  Every preperiodic point must
 * have v_p = v_p(c)/d at each bad prime p (forcing the denominator b and
 * requiring d | v_p(c)) and absolute value at most 2*max(1,|c|)^(1/d); the
 * candidates are a/b with |a| <= A and a coprime to b.
 */
struct CandidateGrid {
    bool empty = false;
    std::string empty_reason;       // set when no candidate can exist
    mpz_class denominator = 1;      // b
    mpz_class numerator_bound = 0;  // A
    std::vector<BigRat> candidates; // ascending
};

CandidateGrid preperiodic_candidate_grid(const UnicriticalMap& f);

struct PortraitNode {
    BigRat z;
    BigRat image;  // f(z)
    int tail = 0;  // steps until the orbit enters its cycle
    int period = 0;
};

struct Portrait {
    int d = 2;
    BigRat c;
    std::vector<unsigned long long> bad_places;
    std::vector<PortraitNode> nodes;  // sorted by z
    std::string empty_reason;         // non-empty iff the grid was empty

    size_t size() const { return nodes.size(); }
    std::vector<BigRat> points() const;
    bool contains(const BigRat& z) const;
    const PortraitNode* find(const BigRat& z) const;
    int max_period() const;
    // nonzero points lying on a cycle, grouped by period
    std::map<int, std::vector<BigRat>> cycles() const;
    nlohmann::json to_json() const;
};

// Full rational preperiodic structure of f, via exact orbit runs over the
// candidate grid (an orbit that leaves the grid can never come back to being
// preperiodic, one that revisits a point is preperiodic).
Portrait find_preperiodic(const UnicriticalMap& f);

struct EscapeRate {
    enum class Status { Escaped, BoundedWithinCap };
    Status status = Status::BoundedWithinCap;
    int iterate = 0;    // lock-in iterate for Escaped, cap for bounded
    int cap = 0;
    bool exact = false; // value certified (lock-in, revisit, or invariance)
    LogNumber value;    // exact rational exponent at finite places

    bool escaped() const { return status == Status::Escaped; }
};

/*
 * Local escape rate lim (1/d^n) log^+ |f^n(z)|_v.
 *
 * Finite places are exact: once log^+|f^n z|_v exceeds (1/d) log^+|c|_v the
 * limit equals (1/d^n) log^+|f^n z|_v on the nose.  At the archimedean place
 * the orbit is iterated exactly until it clears R = max(2^{1/(d-1)},
 * (2|c|)^{1/d}) (exact integer comparison) and the convergent tail
 * sum_{k>=n} d^{-(k+1)} log|1 + c/f^k(z)^d| is folded into the reported value.
 * Orbits that revisit a point are bounded with rate exactly 0.
 */
EscapeRate escape_rate(const UnicriticalMap& f, const BigRat& z, const Place& v,
                       int n_max);

struct TransformationCheck {
    bool cap_mismatch = false;  // one side escaped within cap, the other not
    bool finite_exact = false;  // residual identically zero in exact terms
    double residual = 0.0;      // escape_rate(f(z)) - d * escape_rate(z)
};

TransformationCheck check_transformation_rule(const UnicriticalMap& f, const BigRat& z,
                                              const Place& v, int n_max);

struct CoprimalityViolation {
    unsigned long long p;
    BigRat a, b;  // same-period points with v_p(a) > 0 and v_p(b) != 0
};

// Distinct nonzero cycle points of equal period must have disjoint numerator
// support; returns every (p, pair) breaking that.
std::vector<CoprimalityViolation> newton_coprimality_violations(const UnicriticalMap& f,
                                                                const Portrait& portrait);

// Complex roots of the third iterate f^3 (all d^3 of them, Durand-Kerner).
std::vector<Cplx> third_iterate_roots(const UnicriticalMap& f);

// |f^3(beta)| evaluated by iterating f three times in complex doubles.
double third_iterate_residual(const UnicriticalMap& f, Cplx beta);

struct RootDistance {
    double min_log_distance = 0.0;  // -inf when y is exactly a root of f^3
    double bound = 0.0;             // (3/d - 2) * log^+|c|
    std::vector<Cplx> roots;
};

RootDistance min_distance_to_f3_roots(const UnicriticalMap& f, const BigRat& y);

}  // namespace preperlab
