#include "preperlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "preperlab/factorize.hpp"
#include "preperlab/polynomial.hpp"

namespace preperlab {

UnicriticalMap::UnicriticalMap(int degree, BigRat param) : d(degree), c(std::move(param)) {
    if (d < 2) throw precondition_error("unicritical map: need degree >= 2");
    if (c.den() != 1)
        for (const auto& [p, e] : factorize(c.den())) bad_primes.push_back(p);
    h_c = height(c);
}

BigRat UnicriticalMap::apply(const BigRat& z) const {
    return z.pow(d) + c;
}

BigRat UnicriticalMap::iterate(const BigRat& z, int times) const {
    BigRat w = z;
    for (int i = 0; i < times; ++i) w = apply(w);
    return w;
}

bool UnicriticalMap::is_bad(unsigned long long p) const {
    return std::binary_search(bad_primes.begin(), bad_primes.end(), p);
}

long long UnicriticalMap::vp_c(unsigned long long p) const {
    if (c.is_zero()) return 0;
    return valuation(c, p).value();
}

CandidateGrid preperiodic_candidate_grid(const UnicriticalMap& f) {
    CandidateGrid g;
    mpz_class b = 1;
    for (unsigned long long p : f.bad_primes) {
        long long v = f.vp_c(p);  // negative by construction
        if ((-v) % f.d != 0) {
            g.empty = true;
            g.empty_reason = "v_" + std::to_string(p) + "(c) = " + std::to_string(v) +
                             " is not a multiple of d = " + std::to_string(f.d);
            return g;
        }
        mpz_class pk;
        mpz_ui_pow_ui(pk.get_mpz_t(), p, static_cast<unsigned long>((-v) / f.d));
        b *= pk;
    }
    g.denominator = b;

    // largest A with (A/b)^d <= 2^d * max(1, |c|), decided by integer arithmetic:
    // A^d * den(M) <= 2^d * b^d * num(M) for M = max(1, |c|)
    BigRat M = std::max(BigRat(1), f.c.abs());
    mpz_class rhs;
    mpz_pow_ui(rhs.get_mpz_t(), b.get_mpz_t(), f.d);
    rhs *= M.num();
    mpz_class two_d;
    mpz_ui_pow_ui(two_d.get_mpz_t(), 2, f.d);
    rhs *= two_d;

    auto fits = [&](const mpz_class& a) {
        mpz_class ad;
        mpz_pow_ui(ad.get_mpz_t(), a.get_mpz_t(), f.d);
        return ad * M.den() <= rhs;
    };
    mpz_class A, t = rhs / M.den();
    mpz_root(A.get_mpz_t(), t.get_mpz_t(), f.d);
    while (fits(A + 1)) ++A;
    while (A > 0 && !fits(A)) --A;
    g.numerator_bound = A;

    if (A > 5000000) throw cap_error("candidate grid too large: bound " + A.get_str());

    mpz_class radb = 1;
    for (unsigned long long p : f.bad_primes) radb *= mpz_class(static_cast<unsigned long>(p));
    for (mpz_class a = -A; a <= A; ++a) {
        mpz_class gg;
        mpz_gcd(gg.get_mpz_t(), a.get_mpz_t(), radb.get_mpz_t());
        if (gg == 1) g.candidates.emplace_back(a, b);
    }
    return g;
}

std::vector<BigRat> Portrait::points() const {
    std::vector<BigRat> out;
    out.reserve(nodes.size());
    for (const auto& n : nodes) out.push_back(n.z);
    return out;
}

bool Portrait::contains(const BigRat& z) const {
    return find(z) != nullptr;
}

const PortraitNode* Portrait::find(const BigRat& z) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), z,
                               [](const PortraitNode& n, const BigRat& v) { return n.z < v; });
    if (it == nodes.end() || !(it->z == z)) return nullptr;
    return &*it;
}

int Portrait::max_period() const {
    int m = 0;
    for (const auto& n : nodes) m = std::max(m, n.period);
    return m;
}

std::map<int, std::vector<BigRat>> Portrait::cycles() const {
    std::map<int, std::vector<BigRat>> out;
    for (const auto& n : nodes)
        if (n.tail == 0 && !n.z.is_zero()) out[n.period].push_back(n.z);
    return out;
}

nlohmann::json Portrait::to_json() const {
    nlohmann::json j;
    j["d"] = d;
    j["c"] = c.str();
    j["bad_places"] = bad_places;
    j["count"] = nodes.size();
    j["max_period"] = max_period();
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& n : nodes) {
        pts.push_back({{"z", n.z.str()},
                       {"image", n.image.str()},
                       {"tail", n.tail},
                       {"period", n.period}});
    }
    j["points"] = pts;
    if (!empty_reason.empty()) j["empty_reason"] = empty_reason;
    return j;
}

Portrait find_preperiodic(const UnicriticalMap& f) {
    Portrait P;
    P.d = f.d;
    P.c = f.c;
    P.bad_places = f.bad_primes;

    CandidateGrid g = preperiodic_candidate_grid(f);
    if (g.empty) {
        P.empty_reason = g.empty_reason;
        return P;
    }

    std::set<BigRat> grid(g.candidates.begin(), g.candidates.end());
    std::map<BigRat, bool> classified;
    for (const BigRat& z0 : g.candidates) {
        if (classified.count(z0)) continue;
        std::vector<BigRat> path;
        std::set<BigRat> on_path;
        BigRat z = z0;
        bool preper = false;
        while (true) {
            auto known = classified.find(z);
            if (known != classified.end()) {
                preper = known->second;
                break;
            }
            if (!grid.count(z)) {
                // outside the box no point is preperiodic, so neither is
                // anything that maps into it
                preper = false;
                break;
            }
            if (!on_path.insert(z).second) {
                preper = true;  // orbit closed up
                break;
            }
            path.push_back(z);
            z = f.apply(z);
        }
        for (const BigRat& w : path) classified[w] = preper;
    }

    for (const auto& [z, good] : classified) {
        if (!good) continue;
        // walk the orbit once to read off tail length and eventual period
        std::map<BigRat, int> pos;
        std::vector<BigRat> orbit;
        BigRat w = z;
        while (!pos.count(w)) {
            pos[w] = static_cast<int>(orbit.size());
            orbit.push_back(w);
            w = f.apply(w);
        }
        PortraitNode node;
        node.z = z;
        node.image = f.apply(z);
        node.tail = pos[w];
        node.period = static_cast<int>(orbit.size()) - pos[w];
        P.nodes.push_back(std::move(node));
    }
    std::sort(P.nodes.begin(), P.nodes.end(),
              [](const PortraitNode& a, const PortraitNode& b) { return a.z < b.z; });
    return P;
}

namespace {

// exact test for |z|^{d-1} > 2 and |z|^d > 2|c|, the strict escape region
bool past_escape_radius(const BigRat& z, const UnicriticalMap& f) {
    if (z.is_zero()) return false;
    mpz_class n = ::abs(z.num()), den = z.den(), t1, t2;
    mpz_pow_ui(t1.get_mpz_t(), n.get_mpz_t(), f.d - 1);
    mpz_pow_ui(t2.get_mpz_t(), den.get_mpz_t(), f.d - 1);
    if (t1 <= 2 * t2) return false;
    mpz_class nd, dd;
    mpz_pow_ui(nd.get_mpz_t(), n.get_mpz_t(), f.d);
    mpz_pow_ui(dd.get_mpz_t(), den.get_mpz_t(), f.d);
    return nd * f.c.den() > 2 * ::abs(f.c.num()) * dd;
}

// Exact walks square the digit count every iterate; beyond this many bits the
// orbit can no longer be certified and the walk stops as bounded-within-cap.
constexpr size_t kMaxOrbitBits = size_t{1} << 22;

size_t orbit_bits(const BigRat& w) {
    return mpz_sizeinbase(w.num().get_mpz_t(), 2) + mpz_sizeinbase(w.den().get_mpz_t(), 2);
}

EscapeRate arch_escape(const UnicriticalMap& f, const BigRat& z, int n_max) {
    EscapeRate r;
    r.cap = n_max;
    const BigRat abs_c = f.c.abs();
    std::set<BigRat> seen;
    BigRat w = z;
    for (int n = 0; n <= n_max; ++n) {
        if (orbit_bits(w) > kMaxOrbitBits) {
            r.status = EscapeRate::Status::BoundedWithinCap;
            r.iterate = n;
            r.exact = false;
            return r;
        }
        if (past_escape_radius(w, f)) {
            // past the radius the orbit grows monotonically; sum the
            // correction series for the remaining steps in log space
            double L = w.log_abs();
            int s = w.sign();
            double series = 0.0;
            double logc = f.c.is_zero() ? -std::numeric_limits<double>::infinity() : f.c.log_abs();
            double scale = 1.0 / static_cast<double>(f.d);
            for (int j = 0; j < 500; ++j) {
                double logt = logc - f.d * L;
                if (logt < -745.0) break;  // below exp() underflow, series done
                double t = std::exp(logt);
                int sign_t = f.c.sign() * ((f.d % 2 == 0) ? 1 : s);
                double term = std::log1p(sign_t > 0 ? t : -t);
                series += scale * term;
                if (std::fabs(scale * term) < 1e-18) break;
                L = f.d * L + term;
                s = (f.d % 2 == 0) ? 1 : s;
                scale /= static_cast<double>(f.d);
            }
            double dn = std::pow(static_cast<double>(f.d), n);
            r.status = EscapeRate::Status::Escaped;
            r.iterate = n;
            r.exact = false;
            r.value = LogNumber::from_arch((w.log_abs() + series) / dn);
            return r;
        }
        {
            // |z| <= |w| gives |z^d + c| <= |w|^d + |c| <= |w|: the disk of
            // radius |w| is forward invariant, so the orbit is trapped and the
            // rate is exactly 0.  Exact rational comparison.
            BigRat aw = w.abs();
            if (aw.pow(f.d) + abs_c <= aw) {
                r.status = EscapeRate::Status::BoundedWithinCap;
                r.iterate = n;
                r.exact = true;
                return r;
            }
        }
        if (!seen.insert(w).second) {
            r.status = EscapeRate::Status::BoundedWithinCap;
            r.iterate = n;
            r.exact = true;  // the orbit closed up, so it is bounded for good
            return r;
        }
        if (n < n_max) w = f.apply(w);
    }
    r.status = EscapeRate::Status::BoundedWithinCap;
    r.iterate = n_max;
    r.exact = false;
    return r;
}

EscapeRate finite_escape(const UnicriticalMap& f, const BigRat& z, unsigned long long p,
                         int n_max) {
    EscapeRate r;
    r.cap = n_max;
    const long long vc = f.is_bad(p) ? f.vp_c(p) : 0;

    auto lock = [&](long long vw, int n) {
        // v(f w) = d v(w) holds from here on, so the limit is reached
        mpz_class dn;
        mpz_ui_pow_ui(dn.get_mpz_t(), static_cast<unsigned long>(f.d), static_cast<unsigned long>(n));
        r.status = EscapeRate::Status::Escaped;
        r.iterate = n;
        r.exact = true;
        r.value = LogNumber::from_prime(p, BigRat(mpz_class(static_cast<long>(-vw)), dn));
        return r;
    };

    if (vc >= 0) {
        // good prime: nonnegative valuation is forward invariant
        PadicValuation vz = valuation(z, p);
        if (vz >= PadicValuation::of(0)) {
            r.exact = true;
            r.iterate = 0;
            return r;
        }
        return lock(vz.value(), 0);
    }

    std::set<BigRat> seen;
    BigRat w = z;
    for (int n = 0; n <= n_max; ++n) {
        if (orbit_bits(w) > kMaxOrbitBits) {
            r.status = EscapeRate::Status::BoundedWithinCap;
            r.iterate = n;
            r.exact = false;
            return r;
        }
        PadicValuation vw = valuation(w, p);
        if (!vw.is_infinite() && f.d * vw.value() < vc) return lock(vw.value(), n);
        if (vw.is_infinite() || f.d * vw.value() > vc) {
            // v(w^d) > v(c) forces v(f w) = v(c), strictly below the razor
            return lock(vc, n + 1);
        }
        // exactly on the razor line v(w) = v(c)/d: iterate and look again
        if (!seen.insert(w).second) {
            r.status = EscapeRate::Status::BoundedWithinCap;
            r.iterate = n;
            r.exact = true;
            return r;
        }
        if (n < n_max) w = f.apply(w);
    }
    r.status = EscapeRate::Status::BoundedWithinCap;
    r.iterate = n_max;
    r.exact = false;
    return r;
}

}  // namespace

EscapeRate escape_rate(const UnicriticalMap& f, const BigRat& z, const Place& v, int n_max) {
    if (n_max < 1) throw precondition_error("escape_rate: need n_max >= 1");
    if (v.is_arch()) return arch_escape(f, z, n_max);
    return finite_escape(f, z, v.p, n_max);
}

TransformationCheck check_transformation_rule(const UnicriticalMap& f, const BigRat& z,
                                              const Place& v, int n_max) {
    EscapeRate at_z = escape_rate(f, z, v, n_max);
    EscapeRate at_fz = escape_rate(f, f.apply(z), v, n_max);
    TransformationCheck t;
    if (at_z.escaped() != at_fz.escaped()) {
        t.cap_mismatch = true;  // lock-in fell on opposite sides of the cap
        return t;
    }
    LogNumber res = at_fz.value - at_z.value.scaled(BigRat(f.d));
    t.finite_exact = at_z.exact && at_fz.exact && res.is_exact_zero();
    t.residual = res.real();
    return t;
}

std::vector<CoprimalityViolation> newton_coprimality_violations(const UnicriticalMap&,
                                                                const Portrait& portrait) {
    std::vector<CoprimalityViolation> out;
    for (const auto& [period, pts] : portrait.cycles()) {
        std::vector<std::set<unsigned long long>> support(pts.size());
        for (size_t i = 0; i < pts.size(); ++i) {
            mpz_class n = ::abs(pts[i].num());
            if (n != 1)
                for (const auto& [p, e] : factorize(n)) support[i].insert(p);
        }
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j)
                for (unsigned long long p : support[i])
                    if (support[j].count(p)) out.push_back({p, pts[i], pts[j]});
    }
    return out;
}

std::vector<Cplx> third_iterate_roots(const UnicriticalMap& f) {
    return durand_kerner(to_complex_coeffs(iterate_coeffs(f.d, f.c, 3)));
}

double third_iterate_residual(const UnicriticalMap& f, Cplx beta) {
    Cplx w = beta, cc(f.c.to_double(), 0.0);
    for (int i = 0; i < 3; ++i) {
        Cplx acc(1.0, 0.0);
        for (int k = 0; k < f.d; ++k) acc *= w;
        w = acc + cc;
    }
    return std::abs(w);
}

RootDistance min_distance_to_f3_roots(const UnicriticalMap& f, const BigRat& y) {
    RootDistance r;
    r.roots = third_iterate_roots(f);
    double lp = f.c.is_zero() ? 0.0 : std::max(0.0, f.c.log_abs());
    r.bound = (3.0 / static_cast<double>(f.d) - 2.0) * lp;
    if (f.iterate(y, 3).is_zero()) {
        r.min_log_distance = -std::numeric_limits<double>::infinity();
        return r;
    }
    Cplx yc(y.to_double(), 0.0);
    double best = std::numeric_limits<double>::infinity();
    for (const Cplx& root : r.roots) best = std::min(best, std::abs(yc - root));
    r.min_log_distance = std::log(best);
    return r;
}

}  // namespace preperlab
