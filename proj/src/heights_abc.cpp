#include "preperlab/heights_abc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "preperlab/factorize.hpp"
#include "preperlab/julia_geometry.hpp"

namespace preperlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::set<unsigned long long> raw_support_primes(const std::vector<BigRat>& coords) {
    std::set<unsigned long long> primes;
    for (const BigRat& x : coords) {
        mpz_class num = ::abs(x.num());
        if (num != 1)
            for (const auto& [p, e] : factorize(num)) primes.insert(p);
        if (x.den() != 1)
            for (const auto& [p, e] : factorize(x.den())) primes.insert(p);
    }
    return primes;
}

long long min_valuation(const std::vector<BigRat>& coords, unsigned long long p) {
    long long m = 0;
    bool first = true;
    for (const BigRat& x : coords) {
        long long v = valuation(x, p).value();
        if (first || v < m) m = v;
        first = false;
    }
    return m;
}

bool all_valuations_equal(const std::vector<BigRat>& coords, unsigned long long p) {
    long long v0 = valuation(coords.front(), p).value();
    for (const BigRat& x : coords)
        if (valuation(x, p).value() != v0) return false;
    return true;
}

}  // namespace

std::string tuple_kind_name(TupleKind k) {
    switch (k) {
        case TupleKind::Raw: return "raw";
        case TupleKind::Hexagon: return "hexagon";
        case TupleKind::Quadrilateral: return "quad";
        case TupleKind::AbcTriple: return "triple";
    }
    return "raw";
}

BigRat ProjTuple::coordinate_sum() const {
    BigRat s;
    for (const BigRat& x : coords) s += x;
    return s;
}

ProjTuple make_tuple(std::vector<BigRat> coords, TupleKind kind) {
    if (coords.empty()) throw precondition_error("tuple: no coordinates");
    for (size_t i = 0; i < coords.size(); ++i)
        if (coords[i].is_zero())
            throw precondition_error("tuple: coordinate " + std::to_string(i) + " is zero");
    ProjTuple P;
    P.coords = std::move(coords);
    P.kind = kind;
    if (kind != TupleKind::Raw && !P.coordinate_sum().is_zero())
        throw precondition_error("tuple: coordinates do not sum to zero");
    return P;
}

std::vector<mpz_class> primitive_rep(const ProjTuple& P) {
    mpz_class L = 1;
    for (const BigRat& x : P.coords) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), x.den().get_mpz_t());
    std::vector<mpz_class> rep;
    rep.reserve(P.coords.size());
    for (const BigRat& x : P.coords) {
        BigRat scaled = x * BigRat(L);
        rep.push_back(scaled.num());
    }
    mpz_class g = 0;
    for (const mpz_class& x : rep) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    for (mpz_class& x : rep) x /= g;
    if (sgn(rep.front()) < 0)
        for (mpz_class& x : rep) x = -x;
    return rep;
}

double proj_height(const ProjTuple& P) {
    mpz_class best = 0;
    for (const mpz_class& x : primitive_rep(P)) {
        mpz_class a = ::abs(x);
        if (a > best) best = a;
    }
    return log_mpz(best);
}

SupportRad support_and_rad(const ProjTuple& P) {
    SupportRad sr;
    for (const mpz_class& x : primitive_rep(P)) {
        mpz_class a = ::abs(x);
        if (a != 1)
            for (const auto& [p, e] : factorize(a)) sr.support.insert(p);
    }
    for (unsigned long long p : sr.support) sr.rad += std::log(static_cast<double>(p));
    return sr;
}

double tuple_quality(const ProjTuple& P) {
    SupportRad sr = support_and_rad(P);
    if (!(sr.rad > 0.0)) throw precondition_error("tuple quality: radical is trivial");
    return proj_height(P) / sr.rad;
}

double abcd_margin(const ProjTuple& P, double eps, double C) {
    if (!P.coordinate_sum().is_zero())
        throw precondition_error("abcd margin: coordinates must sum to zero");
    return proj_height(P) - (1.0 + eps) * support_and_rad(P).rad - C;
}

AdelicGoodness is_adelically_good(const BigRat& a, const UnicriticalMap& f, long num_div,
                                  long arch_div) {
    if (a.is_zero()) throw precondition_error("adelic goodness: zero input");
    if (!(f.h_c > 0.0)) throw precondition_error("adelic goodness: needs h(c) > 0");
    if (num_div <= 0 || arch_div <= 0) throw precondition_error("adelic goodness: thresholds must be positive");

    AdelicGoodness g;
    for (unsigned long long p : raw_support_primes({a})) {
        if (!f.is_bad(p)) {
            long long v = valuation(a, p).value();
            g.good_prime_sum += static_cast<double>(v) * std::log(static_cast<double>(p));
        }
    }
    g.arch_sum = a.log_abs();
    for (const auto& [p, e] : factorize(static_cast<std::uint64_t>(f.d))) {
        long long v = valuation(a, p).value();
        g.arch_sum += static_cast<double>(-v) * std::log(static_cast<double>(p));
    }
    g.good_prime_bound = f.h_c / static_cast<double>(num_div);
    g.arch_bound = -f.h_c / static_cast<double>(arch_div);
    g.passes = g.good_prime_sum <= g.good_prime_bound && g.arch_sum >= g.arch_bound;
    return g;
}

ProjTuple build_hexagon(const BigRat& p1, const BigRat& p2, const BigRat& p3, const BigRat& p4,
                        const BigRat& p5) {
    struct Side {
        BigRat value;
        const char* formula;
    };
    Side sides[6] = {{p2 - p1, "p2 - p1"}, {p1 - p3, "p1 - p3"},   {-p1 - p4, "-p1 - p4"},
                     {p5 + p1, "p5 + p1"}, {p3 - p5, "p3 - p5"},   {p4 - p2, "p4 - p2"}};
    std::vector<BigRat> coords;
    for (int i = 0; i < 6; ++i) {
        if (sides[i].value.is_zero())
            throw precondition_error("hexagon side " + std::to_string(i + 1) + " (" +
                                     sides[i].formula + ") is zero");
        coords.push_back(sides[i].value);
    }
    return make_tuple(std::move(coords), TupleKind::Hexagon);
}

ProjTuple build_quadrilateral(const BigRat& p1, const BigRat& p2, const BigRat& p3,
                              const BigRat& zeta, int d) {
    if (!(zeta == BigRat(1) || zeta == BigRat(-1)))
        throw precondition_error("quadrilateral: zeta must be 1 or -1 over the rationals");
    if (zeta == BigRat(-1) && d % 2 != 0)
        throw precondition_error("quadrilateral: zeta = -1 needs even degree");
    struct Side {
        BigRat value;
        const char* formula;
    };
    Side sides[4] = {{p2 - p1, "p2 - p1"},
                     {zeta * p1 - p2, "zeta*p1 - p2"},
                     {p3 - zeta * p1, "p3 - zeta*p1"},
                     {p1 - p3, "p1 - p3"}};
    std::vector<BigRat> coords;
    for (int i = 0; i < 4; ++i) {
        if (sides[i].value.is_zero())
            throw precondition_error("quadrilateral side " + std::to_string(i + 1) + " (" +
                                     sides[i].formula + ") is zero");
        coords.push_back(sides[i].value);
    }
    return make_tuple(std::move(coords), TupleKind::Quadrilateral);
}

LogNumber equal_sides_indicator(const UnicriticalMap& f, const BigRat& p_j, const BigRat& p_1,
                                const BigRat& zeta, unsigned long long p) {
    if (!(zeta == BigRat(1) || zeta == BigRat(-1)))
        throw precondition_error("equal sides indicator: zeta must be 1 or -1");
    if (!f.is_bad(p)) return LogNumber::zero();
    long long vc = f.vp_c(p);
    BigRat a1 = p_j - p_1, a2 = p_j - zeta * p_1;
    if (a1.is_zero() || a2.is_zero()) return LogNumber::zero();
    if (f.d * valuation(a1, p).value() != vc) return LogNumber::zero();
    if (f.d * valuation(a2, p).value() != vc) return LogNumber::zero();
    return LogNumber::from_prime(p, BigRat(static_cast<long>(-vc)));
}

ProjTuple periodic_abc_triple(const UnicriticalMap& f, const Portrait& portrait, const BigRat& p1,
                              const BigRat& p2) {
    const PortraitNode* n1 = portrait.find(p1);
    const PortraitNode* n2 = portrait.find(p2);
    if (!n1 || !n2) throw precondition_error("abc triple: points must belong to the portrait");
    if (n1->tail != 0 || n2->tail != 0)
        throw precondition_error("abc triple: points must lie on cycles");
    if (n1->period != n2->period)
        throw precondition_error("abc triple: points must have equal period");
    if (p1 == p2) throw precondition_error("abc triple: points must be distinct");
    if (p1.is_zero() || p2.is_zero()) throw precondition_error("abc triple: points must be nonzero");
    BigRat f1 = f.apply(p1), f2 = f.apply(p2);
    if (f1 == f2) throw precondition_error("abc triple: images collide");
    std::vector<BigRat> coords = {p1.pow(f.d), -p2.pow(f.d), -(f1 - f2)};
    return make_tuple(std::move(coords), TupleKind::AbcTriple);
}

double triple_height_gap(const UnicriticalMap& f, const Portrait& portrait, const BigRat& p1,
                         const BigRat& p2, double xi) {
    ProjTuple T = periodic_abc_triple(f, portrait, p1, p2);
    double h = proj_height(T);
    double rad = support_and_rad(T).rad;
    return h - ((static_cast<double>(f.d) - 1.0 - xi) / static_cast<double>(f.d)) * f.h_c - rad;
}

HPlusMinus h_plus_minus(const ProjTuple& P) {
    HPlusMinus r;
    BigRat maxabs;
    for (const BigRat& x : P.coords) maxabs = std::max(maxabs, x.abs());
    r.h_plus = maxabs > BigRat(1) ? maxabs.log_abs() : 0.0;
    for (unsigned long long p : raw_support_primes(P.coords)) {
        long long m = min_valuation(P.coords, p);
        if (m < 0) r.h_plus += static_cast<double>(-m) * std::log(static_cast<double>(p));
    }
    r.h_minus = r.h_plus - proj_height(P);
    return r;
}

std::string place_class_name(PlaceClass c) {
    switch (c) {
        case PlaceClass::BadEqualSides: return "bad-equal-sides";
        case PlaceClass::BadUnequalSides: return "bad-unequal-sides";
        case PlaceClass::GoodAway: return "good-away-from-degree";
        case PlaceClass::ArchAndDegree: return "arch-and-degree";
    }
    return "arch-and-degree";
}

std::map<PlaceClass, double> per_place_breakdown(const ProjTuple& P, const UnicriticalMap& f) {
    std::map<PlaceClass, double> out{{PlaceClass::BadEqualSides, 0.0},
                                     {PlaceClass::BadUnequalSides, 0.0},
                                     {PlaceClass::GoodAway, 0.0},
                                     {PlaceClass::ArchAndDegree, 0.0}};
    std::set<unsigned long long> primes = raw_support_primes(P.coords);
    for (unsigned long long p : f.bad_primes) primes.insert(p);
    for (const auto& [p, e] : factorize(static_cast<std::uint64_t>(f.d))) primes.insert(p);
    std::set<unsigned long long> radical = support_and_rad(P).support;

    for (unsigned long long p : primes) {
        double term = static_cast<double>(-min_valuation(P.coords, p)) *
                      std::log(static_cast<double>(p));
        if (radical.count(p)) term -= std::log(static_cast<double>(p));
        PlaceClass cls;
        if (f.divides_degree(p))
            cls = PlaceClass::ArchAndDegree;
        else if (f.is_bad(p))
            cls = all_valuations_equal(P.coords, p) ? PlaceClass::BadEqualSides
                                                    : PlaceClass::BadUnequalSides;
        else
            cls = PlaceClass::GoodAway;
        out[cls] += term;
    }
    BigRat maxabs;
    for (const BigRat& x : P.coords) maxabs = std::max(maxabs, x.abs());
    out[PlaceClass::ArchAndDegree] += maxabs.log_abs();
    return out;
}

double pair_height_margin_max(const UnicriticalMap& f, const Portrait& portrait) {
    std::vector<BigRat> pts = portrait.points();
    if (pts.size() < 2) return kNaN;
    double bound = f.h_c / static_cast<double>(f.d) + std::log(4.0);
    double best = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            best = std::max(best, height(pts[i] - pts[j]) - bound);
    return best;
}

nlohmann::json QualityReport::to_json() const {
    nlohmann::json j;
    j["kind"] = tuple_kind_name(tuple.kind);
    nlohmann::json coords = nlohmann::json::array();
    for (const BigRat& x : tuple.coords) coords.push_back(x.str());
    j["coords"] = coords;
    j["h"] = h;
    j["rad"] = rad;
    j["quality"] = quality;
    if (sides_adelically_good) {
        j["adelically_good"] = *sides_adelically_good;
    } else {
        j["adelically_good"] = nullptr;
    }
    j["equal_sides_slice"] = equal_sides_slice;
    return j;
}

namespace {

QualityReport assess_tuple(const UnicriticalMap& f, ProjTuple t, long num_div, long arch_div) {
    QualityReport r;
    r.tuple = std::move(t);
    r.h = proj_height(r.tuple);
    SupportRad sr = support_and_rad(r.tuple);
    r.rad = sr.rad;
    r.quality = sr.rad > 0.0 ? r.h / sr.rad : kNaN;
    if (f.h_c > 0.0) {
        std::vector<bool> good;
        for (const BigRat& x : r.tuple.coords)
            good.push_back(is_adelically_good(x, f, num_div, arch_div).passes);
        r.sides_adelically_good = std::move(good);
    }
    std::set<unsigned long long> equal_sides;
    bool away_exists = false;
    for (unsigned long long p : f.bad_primes) {
        if (f.divides_degree(p)) continue;
        away_exists = true;
        if (all_valuations_equal(r.tuple.coords, p)) equal_sides.insert(p);
    }
    r.equal_sides_slice = away_exists ? slice_fraction(f, equal_sides) : kNaN;
    return r;
}

double portrait_adelic_fraction(const UnicriticalMap& f, const Portrait& portrait, long num_div,
                                long arch_div) {
    if (!(f.h_c > 0.0)) return kNaN;
    std::vector<BigRat> pts = portrait.points();
    if (pts.size() < 2) return kNaN;
    long total = 0, pass = 0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) {
            ++total;
            if (is_adelically_good(pts[i] - pts[j], f, num_div, arch_div).passes) ++pass;
        }
    return static_cast<double>(pass) / static_cast<double>(total);
}

double portrait_min_triple_gap(const UnicriticalMap& f, const Portrait& portrait, double xi) {
    double best = kNaN;
    for (const auto& [period, pts] : portrait.cycles()) {
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j) {
                if (f.apply(pts[i]) == f.apply(pts[j])) continue;
                double gap = triple_height_gap(f, portrait, pts[i], pts[j], xi);
                if (std::isnan(best) || gap < best) best = gap;
            }
    }
    return best;
}

void rank_and_truncate(TupleScan& scan, std::vector<QualityReport>& all) {
    auto better = [](const QualityReport& a, const QualityReport& b) {
        bool an = std::isnan(a.quality), bn = std::isnan(b.quality);
        if (an != bn) return bn;
        if (!an && a.quality != b.quality) return a.quality > b.quality;
        return std::lexicographical_compare(a.tuple.coords.begin(), a.tuple.coords.end(),
                                            b.tuple.coords.begin(), b.tuple.coords.end());
    };
    std::stable_sort(all.begin(), all.end(), better);
    if (all.size() > 10) all.resize(10);
    scan.top = std::move(all);
}

}  // namespace

TupleScan hexagon_scan(const UnicriticalMap& f, const Portrait& portrait, long budget,
                       std::uint64_t seed, long num_div, long arch_div) {
    std::vector<BigRat> pts = portrait.points();
    if (pts.size() < 5)
        throw precondition_error("hexagon scan needs at least 5 portrait points, have " +
                                 std::to_string(pts.size()));
    TupleScan scan;
    scan.adelic_fraction = portrait_adelic_fraction(f, portrait, num_div, arch_div);
    scan.max_pair_height_margin = pair_height_margin_max(f, portrait);
    scan.min_triple_gap = portrait_min_triple_gap(f, portrait, 0.0);

    const size_t n = pts.size();
    unsigned long long total = 1;
    for (size_t k = 0; k < 5; ++k) total *= static_cast<unsigned long long>(n - k);

    std::vector<QualityReport> all;
    auto consider = [&](size_t a, size_t b, size_t c, size_t d, size_t e) {
        ++scan.scanned;
        try {
            all.push_back(assess_tuple(f, build_hexagon(pts[a], pts[b], pts[c], pts[d], pts[e]),
                                       num_div, arch_div));
        } catch (const precondition_error&) {
            ++scan.degenerate_skipped;
        }
    };

    if (budget >= 0 && total <= static_cast<unsigned long long>(budget)) {
        scan.full_enumeration = true;
        for (size_t a = 0; a < n; ++a)
            for (size_t b = 0; b < n; ++b)
                for (size_t c = 0; c < n; ++c)
                    for (size_t d = 0; d < n; ++d)
                        for (size_t e = 0; e < n; ++e) {
                            if (b == a || c == a || c == b || d == a || d == b || d == c ||
                                e == a || e == b || e == c || e == d)
                                continue;
                            consider(a, b, c, d, e);
                        }
    } else {
        scan.full_enumeration = false;
        std::mt19937_64 rng(seed);
        for (long k = 0; k < budget; ++k) {
            size_t idx[5];
            for (int slot = 0; slot < 5;) {
                size_t cand = static_cast<size_t>(rng() % n);
                bool dup = false;
                for (int s = 0; s < slot; ++s)
                    if (idx[s] == cand) dup = true;
                if (dup) continue;
                idx[slot++] = cand;
            }
            consider(idx[0], idx[1], idx[2], idx[3], idx[4]);
        }
    }
    rank_and_truncate(scan, all);
    return scan;
}

TupleScan quadrilateral_scan(const UnicriticalMap& f, const Portrait& portrait, const BigRat& zeta,
                             long budget, std::uint64_t seed, long num_div, long arch_div) {
    if (!(zeta == BigRat(1) || zeta == BigRat(-1)))
        throw precondition_error("quadrilateral scan: zeta must be 1 or -1 over the rationals");
    if (zeta == BigRat(-1) && f.d % 2 != 0)
        throw precondition_error("quadrilateral scan: zeta = -1 needs even degree");
    std::vector<BigRat> pts = portrait.points();
    if (pts.size() < 3)
        throw precondition_error("quadrilateral scan needs at least 3 portrait points, have " +
                                 std::to_string(pts.size()));
    TupleScan scan;
    scan.adelic_fraction = portrait_adelic_fraction(f, portrait, num_div, arch_div);
    scan.max_pair_height_margin = pair_height_margin_max(f, portrait);
    scan.min_triple_gap = portrait_min_triple_gap(f, portrait, 0.0);

    const size_t n = pts.size();
    unsigned long long total = static_cast<unsigned long long>(n) * (n - 1) * (n - 2);

    std::vector<QualityReport> all;
    auto consider = [&](size_t a, size_t b, size_t c) {
        ++scan.scanned;
        try {
            all.push_back(assess_tuple(f, build_quadrilateral(pts[a], pts[b], pts[c], zeta, f.d),
                                       num_div, arch_div));
        } catch (const precondition_error&) {
            ++scan.degenerate_skipped;
        }
    };

    if (budget >= 0 && total <= static_cast<unsigned long long>(budget)) {
        scan.full_enumeration = true;
        for (size_t a = 0; a < n; ++a)
            for (size_t b = 0; b < n; ++b)
                for (size_t c = 0; c < n; ++c) {
                    if (b == a || c == a || c == b) continue;
                    consider(a, b, c);
                }
    } else {
        scan.full_enumeration = false;
        std::mt19937_64 rng(seed);
        for (long k = 0; k < budget; ++k) {
            size_t idx[3];
            for (int slot = 0; slot < 3;) {
                size_t cand = static_cast<size_t>(rng() % n);
                bool dup = false;
                for (int s = 0; s < slot; ++s)
                    if (idx[s] == cand) dup = true;
                if (dup) continue;
                idx[slot++] = cand;
            }
            consider(idx[0], idx[1], idx[2]);
        }
    }
    rank_and_truncate(scan, all);
    return scan;
}

TupleScan abc_triple_scan(const UnicriticalMap& f, const Portrait& portrait, double xi,
                          long num_div, long arch_div) {
    bool pair_exists = false;
    for (const auto& [period, pts] : portrait.cycles())
        if (pts.size() >= 2) pair_exists = true;
    if (!pair_exists)
        throw precondition_error("abc triple scan needs two nonzero cycle points of equal period");

    TupleScan scan;
    scan.adelic_fraction = portrait_adelic_fraction(f, portrait, num_div, arch_div);
    scan.max_pair_height_margin = pair_height_margin_max(f, portrait);
    scan.min_triple_gap = portrait_min_triple_gap(f, portrait, xi);

    std::vector<QualityReport> all;
    for (const auto& [period, pts] : portrait.cycles()) {
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j) {
                ++scan.scanned;
                try {
                    all.push_back(assess_tuple(f, periodic_abc_triple(f, portrait, pts[i], pts[j]),
                                               num_div, arch_div));
                } catch (const precondition_error&) {
                    ++scan.degenerate_skipped;
                }
            }
    }
    rank_and_truncate(scan, all);
    return scan;
}

}  // namespace preperlab
