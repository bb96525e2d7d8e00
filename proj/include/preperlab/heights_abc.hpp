#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "preperlab/dynamics.hpp"

namespace preperlab {

enum class TupleKind { Raw, Hexagon, Quadrilateral, AbcTriple };

std::string tuple_kind_name(TupleKind k);

/*
 * Point of projective space with rational coordinates, none of them zero.
 * Hexagons, quadrilaterals and abc triples additionally have coordinate sum
 * exactly zero by construction.
 */
struct ProjTuple {
    std::vector<BigRat> coords;
    TupleKind kind = TupleKind::Raw;

    BigRat coordinate_sum() const;
};

ProjTuple make_tuple(std::vector<BigRat> coords, TupleKind kind);

// Canonical primitive integer representative: clear denominators, divide by
// the gcd, flip signs so the first coordinate is positive.
std::vector<mpz_class> primitive_rep(const ProjTuple& P);

// Projective height log max_i |x_i| of the primitive representative.
// Scaling-invariant by construction.
double proj_height(const ProjTuple& P);

struct SupportRad {
    std::set<unsigned long long> support;  // primes with unequal coordinate valuations
    double rad = 0.0;                      // sum of log p over the support
};

SupportRad support_and_rad(const ProjTuple& P);

// quality = h / rad; requires rad > 0.
double tuple_quality(const ProjTuple& P);

// h(P) - (1 + eps) * rad(P) - C for sum-zero tuples.
double abcd_margin(const ProjTuple& P, double eps, double C);

struct AdelicGoodness {
    double good_prime_sum = 0.0;  // sum of v_p(a) log p over good-reduction primes
    double arch_sum = 0.0;        // log|a| + sum over p | d of -v_p(a) log p
    double good_prime_bound = 0.0;
    double arch_bound = 0.0;
    bool passes = false;
};

// a is adelically good for f when the good-prime sum is at most h(c)/num_div
// and the arch-and-degree sum is at least -h(c)/arch_div.  Requires a != 0 and
// h(c) > 0.
AdelicGoodness is_adelically_good(const BigRat& a, const UnicriticalMap& f,
                                  long num_div = 600, long arch_div = 800);

// Sum-zero hexagon (p2-p1, p1-p3, -p1-p4, p5+p1, p3-p5, p4-p2); throws
// precondition_error naming the first degenerate side.
ProjTuple build_hexagon(const BigRat& p1, const BigRat& p2, const BigRat& p3,
                        const BigRat& p4, const BigRat& p5);

// Sum-zero quadrilateral (p2-p1, zeta*p1-p2, p3-zeta*p1, p1-p3); zeta in
// {1, -1}, zeta = -1 requires d even.
ProjTuple build_quadrilateral(const BigRat& p1, const BigRat& p2, const BigRat& p3,
                              const BigRat& zeta, int d);

// lambda_p(c) when |p_j - p_1|_p = |p_j - zeta*p_1|_p = |c|_p^{1/d}, else 0.
LogNumber equal_sides_indicator(const UnicriticalMap& f, const BigRat& p_j,
                                const BigRat& p_1, const BigRat& zeta,
                                unsigned long long p);

// (p1^d, -p2^d, -(f(p1)-f(p2))) for distinct nonzero cycle points of equal
// period; stored sum-zero.
ProjTuple periodic_abc_triple(const UnicriticalMap& f, const Portrait& portrait,
                              const BigRat& p1, const BigRat& p2);

// h(P) - [ ((d-1-xi)/d) h(c) + rad(P) ] for the triple built from (p1, p2).
double triple_height_gap(const UnicriticalMap& f, const Portrait& portrait,
                         const BigRat& p1, const BigRat& p2, double xi);

struct HPlusMinus {
    double h_plus = 0.0;   // origin-augmented height of the tuple as given
    double h_minus = 0.0;  // h_plus - h(P), always >= 0
};

HPlusMinus h_plus_minus(const ProjTuple& P);

enum class PlaceClass {
    BadEqualSides,    // bad p not dividing d, all coordinate valuations equal
    BadUnequalSides,  // bad p not dividing d, valuations differ
    GoodAway,         // good reduction, p not dividing d
    ArchAndDegree     // the archimedean place together with p | d
};

std::string place_class_name(PlaceClass c);

// Per-class sums of log max_i|x_i|_v - rad_v(P) over the coordinates of P as
// given (not normalized); the four classes total exactly h(P) - rad(P).
std::map<PlaceClass, double> per_place_breakdown(const ProjTuple& P,
                                                 const UnicriticalMap& f);

// max over distinct portrait pairs of h(z_i - z_j) - (h(c)/d + log 4).
double pair_height_margin_max(const UnicriticalMap& f, const Portrait& portrait);

struct QualityReport {
    ProjTuple tuple;
    double h = 0.0;
    double rad = 0.0;
    double quality = 0.0;  // NaN when rad == 0
    std::optional<std::vector<bool>> sides_adelically_good;  // absent when h(c) = 0
    double equal_sides_slice = 0.0;  // NaN when no bad prime away from d exists

    nlohmann::json to_json() const;
};

struct TupleScan {
    std::vector<QualityReport> top;  // best quality first, at most 10
    size_t scanned = 0;
    size_t degenerate_skipped = 0;
    bool full_enumeration = true;
    double adelic_fraction = 0.0;        // portrait differences passing; NaN if h(c)=0
    double max_pair_height_margin = 0.0; // NaN when fewer than 2 points
    double min_triple_gap = 0.0;         // NaN when no same-period pair exists
};

// Ordered 5-tuples of distinct portrait points; full enumeration when the
// count fits the budget, otherwise seeded uniform sampling.
TupleScan hexagon_scan(const UnicriticalMap& f, const Portrait& portrait,
                       long budget, std::uint64_t seed,
                       long num_div = 600, long arch_div = 800);

TupleScan quadrilateral_scan(const UnicriticalMap& f, const Portrait& portrait,
                             const BigRat& zeta, long budget, std::uint64_t seed,
                             long num_div = 600, long arch_div = 800);

// All distinct same-period cycle pairs (skipping images that collide).
TupleScan abc_triple_scan(const UnicriticalMap& f, const Portrait& portrait,
                          double xi, long num_div = 600, long arch_div = 800);

}  // namespace preperlab
