#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "preperlab/heights_abc.hpp"

using namespace preperlab;

namespace {
const BigRat kC2916 = BigRat(-29, 16);

ProjTuple raw(std::vector<BigRat> coords) {
    return make_tuple(std::move(coords), TupleKind::Raw);
}
}  // namespace

TEST_CASE("tuples reject zero coordinates and broken sum constraints") {
    CHECK_NOTHROW(raw({BigRat(1), BigRat(1), BigRat(1)}));
    CHECK_THROWS_AS(raw({BigRat(1), BigRat(0)}), precondition_error);
    CHECK_THROWS_AS(make_tuple({BigRat(1), BigRat(1), BigRat(1)}, TupleKind::AbcTriple),
                    precondition_error);
    ProjTuple t = make_tuple({BigRat(1), BigRat(-49), BigRat(48)}, TupleKind::AbcTriple);
    CHECK(t.coordinate_sum().is_zero());
    CHECK(tuple_kind_name(t.kind) == "triple");
    CHECK(tuple_kind_name(TupleKind::Hexagon) == "hexagon");
    CHECK(tuple_kind_name(TupleKind::Quadrilateral) == "quad");
    CHECK(tuple_kind_name(TupleKind::Raw) == "raw");
}

TEST_CASE("primitive representative clears denominators and fixes the sign") {
    std::vector<mpz_class> rep =
        primitive_rep(raw({BigRat(2), BigRat(-98), BigRat(96)}));
    CHECK(rep == std::vector<mpz_class>{1, -49, 48});
    rep = primitive_rep(raw({BigRat(1, 16), BigRat(-49, 16), BigRat(3)}));
    CHECK(rep == std::vector<mpz_class>{1, -49, 48});
    rep = primitive_rep(raw({BigRat(-1), BigRat(2)}));
    CHECK(rep == std::vector<mpz_class>{1, -2});
}

TEST_CASE("projective height, support and radical on frozen tuples") {
    ProjTuple abc = make_tuple({BigRat(1), BigRat(-49), BigRat(48)}, TupleKind::AbcTriple);
    CHECK(proj_height(abc) == doctest::Approx(std::log(49.0)).epsilon(1e-12));
    SupportRad sr = support_and_rad(abc);
    CHECK(sr.support == std::set<unsigned long long>{2, 3, 7});
    CHECK(sr.rad == doctest::Approx(std::log(42.0)).epsilon(1e-12));
    CHECK(tuple_quality(abc) ==
          doctest::Approx(std::log(49.0) / std::log(42.0)).epsilon(1e-12));

    CHECK(proj_height(raw({BigRat(1), BigRat(1), BigRat(1)})) == 0.0);
    CHECK(support_and_rad(raw({BigRat(1), BigRat(1), BigRat(1)})).rad == 0.0);
    CHECK_THROWS_AS(tuple_quality(raw({BigRat(1), BigRat(1), BigRat(1)})),
                    precondition_error);
}

TEST_CASE("height, radical and quality are invariant under scaling") {
    std::mt19937_64 rng(13);
    ProjTuple base = make_tuple({BigRat(1), BigRat(-49), BigRat(48)}, TupleKind::AbcTriple);
    double h = proj_height(base), rad = support_and_rad(base).rad;
    for (int i = 0; i < 100; ++i) {
        long n = static_cast<long>(rng() % 2000) - 1000;
        long d = static_cast<long>(rng() % 999) + 1;
        if (n == 0) continue;
        BigRat s(n, d);
        std::vector<BigRat> scaled;
        for (const BigRat& x : base.coords) scaled.push_back(x * s);
        ProjTuple t = make_tuple(std::move(scaled), TupleKind::AbcTriple);
        CHECK(proj_height(t) == h);
        CHECK(support_and_rad(t).rad == rad);
        CHECK(tuple_quality(t) == h / rad);
    }
}

TEST_CASE("height-minus-radical margins for sum-zero tuples") {
    ProjTuple abc = make_tuple({BigRat(1), BigRat(-49), BigRat(48)}, TupleKind::AbcTriple);
    CHECK(abcd_margin(abc, 0.0, 0.0) ==
          doctest::Approx(std::log(49.0) - std::log(42.0)).epsilon(1e-12));
    CHECK(abcd_margin(abc, 0.2, 0.0) < 0.0);

    ProjTuple flat = make_tuple({BigRat(1), BigRat(1), BigRat(-2)}, TupleKind::AbcTriple);
    CHECK(abcd_margin(flat, 0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-14));

    CHECK_THROWS_AS(abcd_margin(raw({BigRat(1), BigRat(1), BigRat(1)}), 0.0, 0.0),
                    precondition_error);
}

TEST_CASE("adelic goodness splits into a good-prime and an arch-and-degree margin") {
    UnicriticalMap f(2, kC2916);

    // |1/2| at the archimedean place cancels against the 2-adic term exactly
    AdelicGoodness half = is_adelically_good(BigRat(1, 2), f);
    CHECK(half.passes);
    CHECK(half.good_prime_sum == 0.0);
    CHECK(half.arch_sum == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(half.good_prime_bound ==
          doctest::Approx(std::log(29.0) / 600).epsilon(1e-12));
    CHECK(half.arch_bound == doctest::Approx(-std::log(29.0) / 800).epsilon(1e-12));

    // 3 is a good prime away from the degree, so |1/3| has nothing to cancel it
    AdelicGoodness third = is_adelically_good(BigRat(1, 3), f);
    CHECK_FALSE(third.passes);
    CHECK(third.arch_sum == doctest::Approx(-std::log(3.0)).epsilon(1e-12));

    // good-prime numerator support pushes the first sum over its threshold
    AdelicGoodness five = is_adelically_good(BigRat(5), f);
    CHECK_FALSE(five.passes);
    CHECK(five.good_prime_sum == doctest::Approx(std::log(5.0)).epsilon(1e-12));

    AdelicGoodness two = is_adelically_good(BigRat(2), f);
    CHECK(two.passes);
    CHECK(two.arch_sum == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(is_adelically_good(BigRat(0), f), precondition_error);
    CHECK_THROWS_AS(is_adelically_good(BigRat(1), UnicriticalMap(2, BigRat(0))),
                    precondition_error);
    CHECK_THROWS_AS(is_adelically_good(BigRat(1), f, 0, 800), precondition_error);
}

TEST_CASE("hexagon sides from five points, with degenerate sides named") {
    ProjTuple hex = build_hexagon(BigRat(-1, 4), BigRat(1, 4), BigRat(3, 4),
                                  BigRat(5, 4), BigRat(7, 4));
    CHECK(hex.kind == TupleKind::Hexagon);
    CHECK(hex.coords == std::vector<BigRat>{BigRat(1, 2), BigRat(-1), BigRat(-1),
                                            BigRat(3, 2), BigRat(-1), BigRat(1)});
    CHECK(hex.coordinate_sum().is_zero());
    CHECK(proj_height(hex) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(support_and_rad(hex).rad == doctest::Approx(std::log(6.0)).epsilon(1e-12));

    CHECK_THROWS_WITH_AS(build_hexagon(BigRat(1, 4), BigRat(1, 4), BigRat(3, 4),
                                       BigRat(5, 4), BigRat(7, 4)),
                         doctest::Contains("side 1"), precondition_error);
    // p4 = -p1 kills side 3 = -p1 - p4
    CHECK_THROWS_WITH_AS(build_hexagon(BigRat(-1, 4), BigRat(1, 4), BigRat(3, 4),
                                       BigRat(1, 4), BigRat(7, 4)),
                         doctest::Contains("side 3"), precondition_error);
}

TEST_CASE("quadrilateral sides from three points and a unit zeta") {
    ProjTuple quad = build_quadrilateral(BigRat(1, 4), BigRat(3, 4), BigRat(5, 4),
                                         BigRat(-1), 2);
    CHECK(quad.kind == TupleKind::Quadrilateral);
    CHECK(quad.coords == std::vector<BigRat>{BigRat(1, 2), BigRat(-1), BigRat(3, 2),
                                             BigRat(-1)});
    CHECK(quad.coordinate_sum().is_zero());

    CHECK_THROWS_AS(build_quadrilateral(BigRat(1), BigRat(2), BigRat(3), BigRat(2), 2),
                    precondition_error);  // zeta not a rational unit
    CHECK_THROWS_AS(build_quadrilateral(BigRat(1), BigRat(2), BigRat(3), BigRat(-1), 3),
                    precondition_error);  // zeta = -1 needs even degree
    CHECK_THROWS_WITH_AS(build_quadrilateral(BigRat(1, 4), BigRat(1, 4), BigRat(5, 4),
                                             BigRat(1), 2),
                         doctest::Contains("side 1"), precondition_error);
}

TEST_CASE("equal-sides indicator fires only on matched borderline valuations") {
    UnicriticalMap f(2, BigRat(-13, 9));  // v_3(c) = -2, so the target is v = -1

    LogNumber hit = equal_sides_indicator(f, BigRat(1, 3), BigRat(-1, 3), BigRat(1), 3);
    CHECK(hit.finite_exponent(3) == BigRat(2));  // lambda_3(c) = 2 log 3

    CHECK(equal_sides_indicator(f, BigRat(4, 3), BigRat(1, 3), BigRat(1), 3)
              .is_exact_zero());  // difference 1 has valuation 0
    CHECK(equal_sides_indicator(f, BigRat(1, 3), BigRat(-1, 3), BigRat(-1), 3)
              .is_exact_zero());  // second side vanishes
    CHECK(equal_sides_indicator(f, BigRat(1, 3), BigRat(-1, 3), BigRat(1), 5)
              .is_exact_zero());  // good prime
    CHECK_THROWS_AS(
        equal_sides_indicator(f, BigRat(1, 3), BigRat(-1, 3), BigRat(2), 3),
        precondition_error);
}

TEST_CASE("abc triples from same-period cycle points") {
    UnicriticalMap f(2, kC2916);
    Portrait P = find_preperiodic(f);

    ProjTuple t = periodic_abc_triple(f, P, BigRat(-1, 4), BigRat(-7, 4));
    CHECK(t.coords == std::vector<BigRat>{BigRat(1, 16), BigRat(-49, 16), BigRat(3)});
    CHECK(primitive_rep(t) == std::vector<mpz_class>{1, -49, 48});

    // p1^d - p2^d = f(p1) - f(p2) holds identically, hence the zero sum
    CHECK(t.coordinate_sum().is_zero());

    CHECK_THROWS_AS(periodic_abc_triple(f, P, BigRat(9, 4), BigRat(-7, 4)),
                    precondition_error);  // not a portrait point
    CHECK_THROWS_AS(periodic_abc_triple(f, P, BigRat(3, 4), BigRat(-7, 4)),
                    precondition_error);  // tail point
    CHECK_THROWS_AS(periodic_abc_triple(f, P, BigRat(-1, 4), BigRat(-1, 4)),
                    precondition_error);  // not distinct

    UnicriticalMap g(2, BigRat(-1));
    Portrait Q = find_preperiodic(g);
    CHECK_THROWS_AS(periodic_abc_triple(g, Q, BigRat(0), BigRat(-1)),
                    precondition_error);  // zero cycle point

    // two distinct fixed points also qualify
    UnicriticalMap h(2, BigRat(-3, 4));
    Portrait R = find_preperiodic(h);
    ProjTuple fixed = periodic_abc_triple(h, R, BigRat(-1, 2), BigRat(3, 2));
    CHECK(primitive_rep(fixed) == std::vector<mpz_class>{1, -9, 8});
}

TEST_CASE("triple height gap against hand values") {
    UnicriticalMap f(2, kC2916);
    Portrait P = find_preperiodic(f);
    double gap = triple_height_gap(f, P, BigRat(-1, 4), BigRat(-7, 4), 0.0);
    double want = std::log(49.0) - 0.5 * std::log(29.0) - std::log(42.0);
    CHECK(gap == doctest::Approx(want).epsilon(1e-12));

    // raising xi by one returns h(c)/d to the gap
    double shifted = triple_height_gap(f, P, BigRat(-1, 4), BigRat(-7, 4), 1.0);
    CHECK(shifted - gap == doctest::Approx(0.5 * std::log(29.0)).epsilon(1e-12));
}

TEST_CASE("origin-augmented height splits into projective height plus excess") {
    HPlusMinus a = h_plus_minus(raw({BigRat(1, 16), BigRat(49, 16), BigRat(-3)}));
    CHECK(a.h_plus == doctest::Approx(std::log(49.0)).epsilon(1e-12));
    CHECK(a.h_minus == doctest::Approx(0.0).epsilon(1e-12));

    HPlusMinus b = h_plus_minus(raw({BigRat(1, 2), BigRat(1, 2), BigRat(1, 2)}));
    CHECK(b.h_plus == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(b.h_minus == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    HPlusMinus c = h_plus_minus(raw({BigRat(1), BigRat(-49), BigRat(48)}));
    CHECK(c.h_plus == doctest::Approx(std::log(49.0)).epsilon(1e-12));
    CHECK(c.h_minus == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("per-place breakdown reconciles to height minus radical") {
    UnicriticalMap f(2, kC2916);
    ProjTuple hex = build_hexagon(BigRat(-1, 4), BigRat(1, 4), BigRat(3, 4),
                                  BigRat(5, 4), BigRat(7, 4));
    auto classes = per_place_breakdown(hex, f);
    REQUIRE(classes.size() == 4);
    double total = 0.0;
    for (const auto& [cls, value] : classes) total += value;
    CHECK(total ==
          doctest::Approx(std::log(3.0) - std::log(6.0)).epsilon(1e-12));
    // the good prime 3 contributes its radical term, 2 rides with the degree
    CHECK(classes.at(PlaceClass::GoodAway) ==
          doctest::Approx(-std::log(3.0)).epsilon(1e-12));
    CHECK(classes.at(PlaceClass::ArchAndDegree) ==
          doctest::Approx(std::log(1.5)).epsilon(1e-12));
    CHECK(classes.at(PlaceClass::BadEqualSides) == 0.0);
    CHECK(classes.at(PlaceClass::BadUnequalSides) == 0.0);

    auto trivial = per_place_breakdown(raw({BigRat(1), BigRat(1), BigRat(1)}), f);
    for (const auto& [cls, value] : trivial) CHECK(value == 0.0);

    // bad prime away from the degree, unequal valuations
    UnicriticalMap g(2, BigRat(-13, 9));
    auto uneq = per_place_breakdown(raw({BigRat(1, 9), BigRat(1), BigRat(3)}), g);
    CHECK(uneq.at(PlaceClass::BadUnequalSides) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-12));
    double utotal = 0.0;
    for (const auto& [cls, value] : uneq) utotal += value;
    CHECK(utotal == doctest::Approx(2 * std::log(3.0)).epsilon(1e-12));

    // bad prime away from the degree, all valuations equal
    auto eq = per_place_breakdown(raw({BigRat(1, 3), BigRat(2, 3), BigRat(5, 3)}), g);
    CHECK(eq.at(PlaceClass::BadEqualSides) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-12));
    double etotal = 0.0;
    for (const auto& [cls, value] : eq) etotal += value;
    CHECK(etotal == doctest::Approx(std::log(5.0) - std::log(10.0)).epsilon(1e-12));

    CHECK(place_class_name(PlaceClass::BadEqualSides) != place_class_name(PlaceClass::GoodAway));
}

TEST_CASE("pairwise portrait height margin stays below the uniform bound") {
    UnicriticalMap f(2, kC2916);
    Portrait P = find_preperiodic(f);
    double margin = pair_height_margin_max(f, P);
    // the widest pair is 7/4 - (-7/4) = 7/2 of height log 7
    double want = std::log(7.0) - 0.5 * std::log(29.0) - std::log(4.0);
    CHECK(margin == doctest::Approx(want).epsilon(1e-12));
    CHECK(margin <= 0.0);

    Portrait empty = find_preperiodic(UnicriticalMap(2, BigRat(1, 8)));
    CHECK(std::isnan(pair_height_margin_max(f, empty)));
}

TEST_CASE("hexagon scan enumerates ordered 5-tuples with quality ranking") {
    UnicriticalMap f(2, kC2916);
    Portrait P = find_preperiodic(f);

    TupleScan scan = hexagon_scan(f, P, 20000, 1);
    CHECK(scan.full_enumeration);
    CHECK(scan.scanned == 6720);  // 8*7*6*5*4 ordered choices
    REQUIRE(scan.top.size() == 10);
    for (size_t i = 0; i + 1 < scan.top.size(); ++i)
        CHECK(scan.top[i].quality >= scan.top[i + 1].quality);
    for (const QualityReport& r : scan.top) {
        CHECK(r.tuple.coordinate_sum().is_zero());
        CHECK(r.quality == doctest::Approx(r.h / r.rad).epsilon(1e-14));
        REQUIRE(r.sides_adelically_good.has_value());
        CHECK(r.sides_adelically_good->size() == 6);
        CHECK(std::isnan(r.equal_sides_slice));  // the only bad prime divides d
        auto j = r.to_json();
        CHECK(j.contains("kind"));
        CHECK(j.contains("coords"));
        CHECK(j.contains("quality"));
    }
    CHECK(scan.adelic_fraction == doctest::Approx(17.0 / 28).epsilon(1e-12));
    CHECK(scan.max_pair_height_margin ==
          doctest::Approx(pair_height_margin_max(f, P)).epsilon(1e-14));

    TupleScan none = hexagon_scan(f, P, 0, 1);
    CHECK(none.scanned == 0);
    CHECK(none.top.empty());
    CHECK_FALSE(none.full_enumeration);

    TupleScan s1 = hexagon_scan(f, P, 100, 7);
    TupleScan s2 = hexagon_scan(f, P, 100, 7);
    CHECK(s1.scanned == 100);
    CHECK_FALSE(s1.full_enumeration);
    REQUIRE(s1.top.size() == s2.top.size());
    for (size_t i = 0; i < s1.top.size(); ++i)
        CHECK(s1.top[i].tuple.coords == s2.top[i].tuple.coords);

    Portrait small = find_preperiodic(UnicriticalMap(2, BigRat(1, 4)));
    CHECK_THROWS_WITH_AS(hexagon_scan(f, small, 10, 1), doctest::Contains("5"),
                         precondition_error);
}

TEST_CASE("quadrilateral scan walks ordered triples and skips degenerate ones") {
    UnicriticalMap f(2, BigRat(-13, 9));
    Portrait P = find_preperiodic(f);
    REQUIRE(P.size() == 6);

    TupleScan scan = quadrilateral_scan(f, P, BigRat(-1), 20000, 1);
    CHECK(scan.full_enumeration);
    CHECK(scan.scanned == 120);  // 6*5*4 ordered triples
    CHECK(scan.degenerate_skipped > 0);  // p2 = -p1 kills the second side
    REQUIRE_FALSE(scan.top.empty());
    for (const QualityReport& r : scan.top) {
        CHECK(r.tuple.coords.size() == 4);
        CHECK(r.tuple.coordinate_sum().is_zero());
        CHECK_FALSE(std::isnan(r.equal_sides_slice));  // 3 is a bad prime away from d
        CHECK(r.equal_sides_slice >= 0.0);
        CHECK(r.equal_sides_slice <= 1.0);
    }

    Portrait small = find_preperiodic(UnicriticalMap(2, BigRat(1, 4)));
    CHECK_THROWS_AS(quadrilateral_scan(f, small, BigRat(1), 10, 1), precondition_error);
    CHECK_THROWS_AS(quadrilateral_scan(f, P, BigRat(2), 10, 1), precondition_error);
    CHECK_THROWS_AS(
        quadrilateral_scan(UnicriticalMap(3, BigRat(0)),
                           find_preperiodic(UnicriticalMap(3, BigRat(0))), BigRat(-1),
                           10, 1),
        precondition_error);
}

TEST_CASE("abc triple scan covers the same-period cycle pairs") {
    UnicriticalMap f(2, kC2916);
    Portrait P = find_preperiodic(f);

    TupleScan scan = abc_triple_scan(f, P, 0.0);
    CHECK(scan.full_enumeration);
    CHECK(scan.scanned == 3);  // unordered pairs from the 3-cycle
    REQUIRE_FALSE(scan.top.empty());
    CHECK(scan.top[0].h == doctest::Approx(std::log(49.0)).epsilon(1e-12));
    CHECK(scan.top[0].rad == doctest::Approx(std::log(42.0)).epsilon(1e-12));
    CHECK(scan.top[0].quality ==
          doctest::Approx(std::log(49.0) / std::log(42.0)).epsilon(1e-12));

    // worst pair is (-7/4, 5/4) -> (49, -25, -24) with radical log 210
    double want_gap = std::log(49.0) - 0.5 * std::log(29.0) - std::log(210.0);
    CHECK(scan.min_triple_gap == doctest::Approx(want_gap).epsilon(1e-12));

    TupleScan lifted = abc_triple_scan(f, P, 1.0);
    CHECK(lifted.min_triple_gap - scan.min_triple_gap ==
          doctest::Approx(0.5 * std::log(29.0)).epsilon(1e-12));

    // a portrait whose only nonzero cycle is a single fixed point
    Portrait Q = find_preperiodic(UnicriticalMap(2, BigRat(0)));
    CHECK_THROWS_AS(abc_triple_scan(UnicriticalMap(2, BigRat(0)), Q, 0.0),
                    precondition_error);

    // two rational fixed points give exactly one unordered pair
    UnicriticalMap h(2, BigRat(-3, 4));
    TupleScan pairs = abc_triple_scan(h, find_preperiodic(h), 0.0);
    CHECK(pairs.scanned == 1);
    CHECK(pairs.top[0].h == doctest::Approx(std::log(9.0)).epsilon(1e-12));
    CHECK(pairs.top[0].rad == doctest::Approx(std::log(6.0)).epsilon(1e-12));
}
