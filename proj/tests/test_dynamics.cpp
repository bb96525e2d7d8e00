#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "preperlab/dynamics.hpp"

using namespace preperlab;

namespace {
const BigRat kC2916 = BigRat(-29, 16);
}

TEST_CASE("UnicriticalMap exposes degree, bad primes and height of c") {
    UnicriticalMap f(2, kC2916);
    CHECK(f.d == 2);
    CHECK(f.bad_primes == std::vector<unsigned long long>{2});
    CHECK(f.h_c == doctest::Approx(std::log(29.0)).epsilon(1e-14));
    CHECK(f.vp_c(2) == -4);
    CHECK(f.is_bad(2));
    CHECK_FALSE(f.is_bad(3));
    CHECK(f.divides_degree(2));
    CHECK_FALSE(f.divides_degree(3));
    CHECK(f.apply(BigRat(1, 2)) == BigRat(-25, 16));
    CHECK(f.iterate(BigRat(-1, 4), 3) == BigRat(-1, 4));  // 3-cycle point

    UnicriticalMap g(3, BigRat(1, 100));
    CHECK(g.bad_primes == std::vector<unsigned long long>{2, 5});
    CHECK_THROWS_AS(UnicriticalMap(1, BigRat(0)), precondition_error);
}

TEST_CASE("candidate grid forces the denominator and bounds the numerator") {
    CandidateGrid g = preperiodic_candidate_grid(UnicriticalMap(2, kC2916));
    CHECK_FALSE(g.empty);
    CHECK(g.denominator == 4);
    CHECK(g.numerator_bound == 10);
    // numerators coprime to 2, so zero is excluded and all are odd
    CHECK(g.candidates.size() == 10);
    for (const BigRat& z : g.candidates) {
        CHECK(z.den() == 4);
        CHECK(mpz_class(z.num() % 2) != 0);
    }
    CHECK(std::is_sorted(g.candidates.begin(), g.candidates.end()));
}

TEST_CASE("candidate grid is empty when a bad valuation misses the degree") {
    CandidateGrid g = preperiodic_candidate_grid(UnicriticalMap(2, BigRat(1, 8)));
    CHECK(g.empty);
    CHECK(g.candidates.empty());
    CHECK(g.empty_reason.find("not a multiple") != std::string::npos);
    CHECK(g.empty_reason.find("v_2(c) = -3") != std::string::npos);
}

TEST_CASE("candidate grid for good reduction keeps integers including zero") {
    CandidateGrid g = preperiodic_candidate_grid(UnicriticalMap(2, BigRat(0)));
    CHECK(g.denominator == 1);
    CHECK(g.numerator_bound == 2);
    CHECK(g.candidates == std::vector<BigRat>{BigRat(-2), BigRat(-1), BigRat(0),
                                              BigRat(1), BigRat(2)});
}

TEST_CASE("candidate grid handles higher degree denominators") {
    // den(c) = 27000 = (2*3*5)^3, so b = 30 and A^3 <= 8 * 30^3 gives A = 60
    CandidateGrid g = preperiodic_candidate_grid(UnicriticalMap(3, BigRat(-1, 27000)));
    CHECK_FALSE(g.empty);
    CHECK(g.denominator == 30);
    CHECK(g.numerator_bound == 60);
    for (const BigRat& z : g.candidates) CHECK(z.den() == 30);
}

TEST_CASE("grids whose numerator bound explodes are refused by the cap") {
    UnicriticalMap f(2, BigRat(mpz_class("100000000000000"), mpz_class(1)));
    CHECK_THROWS_AS(preperiodic_candidate_grid(f), cap_error);
}

TEST_CASE("the full preperiodic portrait of z^2 - 29/16") {
    Portrait P = find_preperiodic(UnicriticalMap(2, kC2916));
    REQUIRE(P.size() == 8);
    std::vector<BigRat> want = {BigRat(-7, 4), BigRat(-5, 4), BigRat(-3, 4),
                                BigRat(-1, 4), BigRat(1, 4),  BigRat(3, 4),
                                BigRat(5, 4),  BigRat(7, 4)};
    CHECK(P.points() == want);
    CHECK(P.max_period() == 3);
    CHECK(P.bad_places == std::vector<unsigned long long>{2});

    // the unique cycle is -1/4 -> -7/4 -> 5/4 -> -1/4
    auto cyc = P.cycles();
    REQUIRE(cyc.size() == 1);
    REQUIRE(cyc.count(3) == 1);
    CHECK(cyc.at(3) == std::vector<BigRat>{BigRat(-7, 4), BigRat(-1, 4), BigRat(5, 4)});

    auto node = [&](long num) { return P.find(BigRat(num, 4)); };
    CHECK(node(-1)->tail == 0);
    CHECK(node(-7)->tail == 0);
    CHECK(node(5)->tail == 0);
    CHECK(node(1)->tail == 1);
    CHECK(node(7)->tail == 1);
    CHECK(node(-5)->tail == 1);
    CHECK(node(3)->tail == 2);
    CHECK(node(-3)->tail == 2);
    for (const auto& n : P.nodes) {
        CHECK(n.period == 3);
        CHECK(n.image == BigRat(n.z.pow(2) + kC2916));
    }
    CHECK(P.contains(BigRat(5, 4)));
    CHECK_FALSE(P.contains(BigRat(9, 4)));

    auto j = P.to_json();
    CHECK(j.contains("bad_places"));
    CHECK(j["points"].size() == 8);
}

TEST_CASE("small portraits match hand enumeration") {
    Portrait z2 = find_preperiodic(UnicriticalMap(2, BigRat(0)));
    CHECK(z2.points() == std::vector<BigRat>{BigRat(-1), BigRat(0), BigRat(1)});
    CHECK(z2.find(BigRat(-1))->tail == 1);
    CHECK(z2.find(BigRat(0))->period == 1);

    Portrait q = find_preperiodic(UnicriticalMap(2, BigRat(1, 4)));
    CHECK(q.points() == std::vector<BigRat>{BigRat(-1, 2), BigRat(1, 2)});
    CHECK(q.find(BigRat(1, 2))->period == 1);
    CHECK(q.find(BigRat(1, 2))->tail == 0);
    CHECK(q.find(BigRat(-1, 2))->tail == 1);

    Portrait cube = find_preperiodic(UnicriticalMap(3, BigRat(0)));
    CHECK(cube.points() == std::vector<BigRat>{BigRat(-1), BigRat(0), BigRat(1)});
    CHECK(cube.find(BigRat(-1))->period == 1);  // (-1)^3 = -1 is fixed
    CHECK(cube.find(BigRat(-1))->tail == 0);

    Portrait empty = find_preperiodic(UnicriticalMap(2, BigRat(1, 8)));
    CHECK(empty.size() == 0);
    CHECK_FALSE(empty.empty_reason.empty());
}

TEST_CASE("portraits agree with the exhaustive orbit oracle") {
    auto check_map = [](int d, const BigRat& c) {
        Portrait P = find_preperiodic(UnicriticalMap(d, c));
        auto want = oracle::brute_force_preperiodic(d, c);
        REQUIRE(P.size() == want.size());
        for (size_t i = 0; i < want.size(); ++i) {
            const PortraitNode* n = P.find(want[i].z);
            REQUIRE(n != nullptr);
            CHECK(n->tail == want[i].tail);
            CHECK(n->period == want[i].period);
        }
    };
    for (long b : {1L, 2L, 4L})
        for (long a = -12; a <= 12; ++a) {
            if (std::gcd(a, b) != 1) continue;
            check_map(2, BigRat(a, b));
        }
    for (long a = -8; a <= 8; ++a) check_map(3, BigRat(a));
    check_map(3, BigRat(-1, 27));
    check_map(2, BigRat(-13, 9));
}

TEST_CASE("2-adic escape rate of z^2 - 29/16 locks in exactly") {
    UnicriticalMap f(2, kC2916);
    Place two = Place::finite(2);

    EscapeRate r = escape_rate(f, BigRat(1, 2), two, 20);
    CHECK(r.escaped());
    CHECK(r.iterate == 1);
    CHECK(r.exact);
    CHECK(r.value.finite_exponent(2) == BigRat(2));  // rate 2 log 2
    CHECK(r.value.arch() == 0.0);

    EscapeRate ri = escape_rate(f, BigRat(3), two, 20);
    CHECK(ri.escaped());
    CHECK(ri.exact);
    CHECK(ri.value.finite_exponent(2) == BigRat(2));
}

TEST_CASE("preperiodic points have exactly zero escape rate everywhere") {
    UnicriticalMap f(2, kC2916);
    Portrait P = find_preperiodic(f);
    for (const BigRat& z : P.points()) {
        for (const Place& v : {Place::finite(2), Place::archimedean()}) {
            EscapeRate r = escape_rate(f, z, v, 20);
            CHECK_FALSE(r.escaped());
            CHECK(r.exact);
            CHECK(r.value.is_exact_zero());
        }
    }
}

TEST_CASE("a borderline 2-adic orbit that never resolves stays uncertified") {
    // v_2(9/4) = -2 and d * v = v_2(c); the squared term and c cancel to
    // valuation -2 again at every step, while |z_n| grows, so no revisit and
    // no lock-in can happen within any cap.
    UnicriticalMap f(2, kC2916);
    EscapeRate r = escape_rate(f, BigRat(9, 4), Place::finite(2), 12);
    CHECK_FALSE(r.escaped());
    CHECK_FALSE(r.exact);

    // the same borderline valuation on a periodic orbit is certified by revisit
    EscapeRate per = escape_rate(f, BigRat(5, 4), Place::finite(2), 12);
    CHECK_FALSE(per.escaped());
    CHECK(per.exact);
    CHECK(per.value.is_exact_zero());
}

TEST_CASE("archimedean escape rate of z^2 at z = 2 is log 2") {
    EscapeRate r = escape_rate(UnicriticalMap(2, BigRat(0)), BigRat(2),
                               Place::archimedean(), 60);
    CHECK(r.escaped());
    CHECK(r.value.real() == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    EscapeRate half = escape_rate(UnicriticalMap(2, BigRat(0)), BigRat(1, 2),
                                  Place::archimedean(), 60);
    CHECK_FALSE(half.escaped());
    CHECK(half.value.is_exact_zero());
}

TEST_CASE("escape rate transforms by the degree along one application of f") {
    UnicriticalMap f(2, kC2916);
    TransformationCheck t = check_transformation_rule(f, BigRat(1, 2), Place::finite(2), 20);
    CHECK_FALSE(t.cap_mismatch);
    CHECK(t.finite_exact);
    CHECK(t.residual == 0.0);

    TransformationCheck arch =
        check_transformation_rule(UnicriticalMap(2, BigRat(0)), BigRat(3),
                                  Place::archimedean(), 60);
    CHECK_FALSE(arch.cap_mismatch);
    CHECK(std::abs(arch.residual) < 1e-9);

    // both sides identically zero on a preperiodic input
    TransformationCheck per = check_transformation_rule(f, BigRat(5, 4), Place::finite(2), 20);
    CHECK(per.finite_exact);
    CHECK(per.residual == 0.0);
}

TEST_CASE("same-period cycle numerators stay coprime across sample maps") {
    for (const BigRat& c : {kC2916, BigRat(0), BigRat(1, 4), BigRat(-13, 9),
                            BigRat(-1), BigRat(-2)}) {
        UnicriticalMap f(2, c);
        Portrait P = find_preperiodic(f);
        CHECK(newton_coprimality_violations(f, P).empty());
    }
}

TEST_CASE("third-iterate roots satisfy the residual certificate") {
    for (const BigRat& c : {BigRat(0), BigRat(-1), kC2916, BigRat(1, 4)}) {
        UnicriticalMap f(2, c);
        std::vector<Cplx> roots = third_iterate_roots(f);
        REQUIRE(roots.size() == 8);
        for (Cplx beta : roots) {
            double bound = 1e-10 * std::pow(1.0 + std::abs(beta), 8.0);
            CHECK(third_iterate_residual(f, beta) < bound);
        }
    }
    // z^8 has a single 8-fold root at the origin
    for (Cplx beta : third_iterate_roots(UnicriticalMap(2, BigRat(0))))
        CHECK(std::abs(beta) < 0.06);
}

TEST_CASE("distance from y to the third-iterate roots, with exact hits") {
    UnicriticalMap f(2, BigRat(-1));

    // f^3(1) = 0 exactly, so the distance is reported as -infinity
    RootDistance hit = min_distance_to_f3_roots(f, BigRat(1));
    CHECK(hit.min_log_distance == -std::numeric_limits<double>::infinity());
    CHECK(hit.roots.size() == 8);

    // nearest roots to 0 are +-i sqrt(sqrt(2) - 1)
    RootDistance zero = min_distance_to_f3_roots(f, BigRat(0));
    double want = 0.5 * std::log(std::sqrt(2.0) - 1.0);
    CHECK(zero.min_log_distance == doctest::Approx(want).epsilon(1e-6));
    CHECK(zero.bound == 0.0);  // (3/d - 2) log^+|c| with |c| = 1

    // y = 1 for c = 0 sits at distance ~1 from the root cluster at 0
    RootDistance one = min_distance_to_f3_roots(UnicriticalMap(2, BigRat(0)), BigRat(1));
    CHECK(std::abs(one.min_log_distance) < 0.1);
    CHECK(one.bound == 0.0);
}
