#include "preperlab/julia_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "preperlab/factorize.hpp"

namespace preperlab {

BigRat level_exponent(int d, int level) {
    if (d < 2 || level < 0) throw std::invalid_argument("level_exponent: bad arguments");
    return BigRat(1 - static_cast<long>(level) * (d - 1), d);
}

BigRat annulus_modulus(int d) {
    if (d < 2) throw std::invalid_argument("annulus_modulus: bad degree");
    return BigRat(d - 1, d);
}

bool ValMatrix::ultrametric_ok() const {
    const size_t n = points.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            for (size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                PadicValuation lo = std::min(entries[i][k], entries[k][j]);
                if (entries[i][j] < lo) return false;
            }
        }
    return true;
}

ValMatrix pairwise_valuation_matrix(const std::vector<BigRat>& T, unsigned long long p) {
    if (!is_prime_u64(p)) throw precondition_error("not a prime: " + std::to_string(p));
    ValMatrix m;
    m.points = T;
    const size_t n = T.size();
    m.entries.assign(n, std::vector<PadicValuation>(n, PadicValuation::infinite()));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            BigRat diff = T[i] - T[j];
            if (diff.is_zero())
                throw precondition_error("coincident points at indices " + std::to_string(i) +
                                         " and " + std::to_string(j));
            m.entries[i][j] = m.entries[j][i] = valuation(diff, p);
        }
    return m;
}

void require_tree_place(const UnicriticalMap& f, unsigned long long p) {
    if (!f.is_bad(p))
        throw precondition_error("p = " + std::to_string(p) + " is not a bad place of this map");
    if (f.divides_degree(p))
        throw precondition_error("p = " + std::to_string(p) + " divides the degree");
    long long v = f.vp_c(p);
    if ((-v) % f.d != 0)
        throw precondition_error("v_" + std::to_string(p) + "(c) = " + std::to_string(v) +
                                 " is not a multiple of d = " + std::to_string(f.d));
}

QuantizationReport quantization_check(const UnicriticalMap& f, const std::vector<BigRat>& T,
                                      unsigned long long p) {
    require_tree_place(f, p);
    const long long e = -f.vp_c(p);  // log|c|_p = e log p, e > 0
    ValMatrix m = pairwise_valuation_matrix(T, p);
    QuantizationReport rep;
    for (size_t i = 0; i < T.size(); ++i)
        for (size_t j = i + 1; j < T.size(); ++j) {
            long long v = m.entries[i][j].value();
            // distance |c|^{(1 - k(d-1))/d} means v = -e(1 - k(d-1))/d
            BigRat k = BigRat(static_cast<long>(f.d * v + e)) / BigRat(static_cast<long>(e * (f.d - 1)));
            QuantizationEntry entry{i, j, k};
            rep.entries.push_back(entry);
            if (!k.is_integer() || k.sign() < 0) {
                rep.pass = false;
                rep.violations.push_back(entry);
            }
        }
    return rep;
}

std::vector<std::vector<BigRat>> cluster_at_level(const UnicriticalMap& f,
                                                  const std::vector<BigRat>& T,
                                                  unsigned long long p, int m) {
    require_tree_place(f, p);
    if (m < 0) throw precondition_error("cluster_at_level: negative level");
    const long long e = -f.vp_c(p);
    // v(level-m radius) = e (m(d-1) - 1) / d
    BigRat rad_v = BigRat(static_cast<long>(e)) * BigRat(static_cast<long>(m) * (f.d - 1) - 1, f.d);

    std::vector<std::vector<BigRat>> blocks;
    for (const BigRat& z : T) {
        bool placed = false;
        for (auto& blk : blocks) {
            BigRat diff = z - blk.front();
            bool same = diff.is_zero();
            if (!same) {
                PadicValuation v = valuation(diff, p);
                same = !v.is_infinite() && BigRat(static_cast<long>(v.value())) >= rad_v;
            }
            if (same) {
                blk.push_back(z);
                placed = true;
                break;
            }
        }
        if (!placed) blocks.push_back({z});
    }
    for (auto& blk : blocks) std::sort(blk.begin(), blk.end());
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return blocks;
}

EquidistributionReport epsilon_equidistribution(const std::vector<long>& counts, long n,
                                                const BigRat& eps) {
    if (counts.empty()) throw precondition_error("epsilon_equidistribution: no buckets");
    if (eps.sign() <= 0) throw precondition_error("epsilon_equidistribution: need eps > 0");
    EquidistributionReport rep;
    const long buckets = static_cast<long>(counts.size());
    BigRat expect = BigRat(n) / BigRat(buckets);
    rep.lower = (BigRat(1) - eps) * expect;
    rep.upper = (BigRat(1) + eps) * expect;
    rep.counts = counts;
    for (long cnt : counts) {
        bool ok = BigRat(cnt) > rep.lower && BigRat(cnt) < rep.upper;
        rep.bucket_ok.push_back(ok);
        if (!ok) rep.pass = false;
    }
    return rep;
}

LogNumber transfinite_diameter(const std::vector<BigRat>& T, const Place& v) {
    const size_t n = T.size();
    if (n < 2) throw precondition_error("transfinite_diameter: need at least two points");
    const long pairs = static_cast<long>(n) * static_cast<long>(n - 1);
    if (v.is_arch()) {
        double sum = 0.0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) {
                BigRat diff = T[i] - T[j];
                if (diff.is_zero()) throw precondition_error("transfinite_diameter: coincident points");
                sum += diff.log_abs();
            }
        return LogNumber::from_arch(2.0 * sum / static_cast<double>(pairs));
    }
    mpz_class total = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            BigRat diff = T[i] - T[j];
            if (diff.is_zero()) throw precondition_error("transfinite_diameter: coincident points");
            total += static_cast<long>(valuation(diff, v.p).value());
        }
    // log|z_i - z_j|_p = -v log p, ordered pairs double the i<j sum
    return LogNumber::from_prime(v.p, BigRat(mpz_class(-2 * total), mpz_class(pairs)));
}

double global_diameter_residual(const std::vector<BigRat>& T) {
    std::set<unsigned long long> primes;
    for (size_t i = 0; i < T.size(); ++i)
        for (size_t j = i + 1; j < T.size(); ++j) {
            BigRat diff = T[i] - T[j];
            if (diff.is_zero()) throw precondition_error("global_diameter_residual: coincident points");
            mpz_class num = ::abs(diff.num());
            if (num != 1)
                for (const auto& [p, e] : factorize(num)) primes.insert(p);
            if (diff.den() != 1)
                for (const auto& [p, e] : factorize(diff.den())) primes.insert(p);
        }
    LogNumber total = transfinite_diameter(T, Place::archimedean());
    for (unsigned long long p : primes) total += transfinite_diameter(T, Place::finite(p));
    return total.real();
}

void WeightVector::validate() const {
    if (d < 2 || level < 0) throw std::invalid_argument("weight vector: bad shape");
    size_t want = 1;
    for (int i = 0; i < level; ++i) want *= static_cast<size_t>(d);
    if (weights.size() != want)
        throw std::invalid_argument("weight vector: expected " + std::to_string(want) +
                                    " entries, got " + std::to_string(weights.size()));
    BigRat sum;
    for (const BigRat& w : weights) {
        if (w.sign() < 0) throw std::invalid_argument("weight vector: negative mass");
        sum += w;
    }
    if (!(sum == BigRat(1))) throw std::invalid_argument("weight vector: total mass is not 1");
}

WeightVector uniform_weights(int d, int level) {
    WeightVector w;
    w.d = d;
    w.level = level;
    long n = 1;
    for (int i = 0; i < level; ++i) n *= d;
    w.weights.assign(static_cast<size_t>(n), BigRat(1, n));
    w.validate();
    return w;
}

WeightVector refine_weights(const WeightVector& w, int m) {
    w.validate();
    if (m < w.level) throw std::invalid_argument("refine_weights: target level below input");
    long span = 1;
    for (int i = w.level; i < m; ++i) span *= w.d;
    WeightVector out;
    out.d = w.d;
    out.level = m;
    out.weights.reserve(w.weights.size() * static_cast<size_t>(span));
    for (const BigRat& mass : w.weights) {
        BigRat piece = mass / BigRat(span);
        for (long k = 0; k < span; ++k) out.weights.push_back(piece);
    }
    return out;
}

BigRat energy_exponent(const WeightVector& w) {
    w.validate();
    const int m = w.level;
    // subtree masses bottom-up; Q_l = sum of squared masses at level l
    std::vector<BigRat> masses = w.weights;
    std::vector<BigRat> Q(static_cast<size_t>(m) + 1);
    for (int l = m; l >= 0; --l) {
        BigRat q;
        for (const BigRat& x : masses) q += x * x;
        Q[static_cast<size_t>(l)] = q;
        if (l > 0) {
            std::vector<BigRat> up(masses.size() / static_cast<size_t>(w.d));
            for (size_t i = 0; i < up.size(); ++i) {
                BigRat s;
                for (int k = 0; k < w.d; ++k) s += masses[i * static_cast<size_t>(w.d) + static_cast<size_t>(k)];
                up[i] = s;
            }
            masses = std::move(up);
        }
    }
    BigRat total;
    for (int l = 0; l < m; ++l)
        total += level_exponent(w.d, l) * (Q[static_cast<size_t>(l)] - Q[static_cast<size_t>(l) + 1]);
    total += level_exponent(w.d, m) * Q[static_cast<size_t>(m)];
    return -total;
}

namespace {

BigRat inv_power(int d, int e) {
    mpz_class de;
    mpz_ui_pow_ui(de.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(e));
    return BigRat(mpz_class(1), de);
}

}  // namespace

BigRat telescoping_residual(const WeightVector& k2, int m) {
    k2.validate();
    if (k2.level != 2) throw std::invalid_argument("telescoping_residual: need a level-2 weight vector");
    if (m < 2) throw std::invalid_argument("telescoping_residual: need m >= 2");
    BigRat increment = energy_exponent(refine_weights(k2, m + 1)) - energy_exponent(refine_weights(k2, m));
    return increment - (inv_power(k2.d, m + 1) - inv_power(k2.d, m + 2));
}

BigRat capacity_exponent_limit(const WeightVector& k2) {
    k2.validate();
    if (k2.level != 2) throw std::invalid_argument("capacity_exponent_limit: need a level-2 weight vector");
    return -energy_exponent(k2) - inv_power(k2.d, 3);
}

BigRat telescoping_residual(const WeightVector& k2, const UnicriticalMap& f,
                            unsigned long long p, int m) {
    require_tree_place(f, p);
    if (k2.d != f.d) throw std::invalid_argument("telescoping_residual: degree mismatch");
    return telescoping_residual(k2, m);
}

BigRat capacity_exponent_limit(const WeightVector& k2, const UnicriticalMap& f,
                               unsigned long long p) {
    require_tree_place(f, p);
    if (k2.d != f.d) throw std::invalid_argument("capacity_exponent_limit: degree mismatch");
    return capacity_exponent_limit(k2);
}

std::vector<long> level2_counts(const UnicriticalMap& f, const std::vector<BigRat>& T,
                                unsigned long long p) {
    require_tree_place(f, p);
    const size_t d = static_cast<size_t>(f.d);
    std::vector<long> counts(d * d, 0);
    if (T.empty()) return counts;

    auto level1 = cluster_at_level(f, T, p, 1);
    if (level1.size() > d)
        throw precondition_error("level2_counts: more than d blocks at level 1");
    auto level2 = cluster_at_level(f, T, p, 2);

    for (size_t b1 = 0; b1 < level1.size(); ++b1) {
        size_t slot = 0;
        for (const auto& blk : level2) {
            // parent test: the sub-block's representative lies in this block
            const BigRat& rep = blk.front();
            bool inside = std::binary_search(level1[b1].begin(), level1[b1].end(), rep);
            if (!inside) continue;
            if (slot >= d) throw precondition_error("level2_counts: more than d blocks inside a level-1 disk");
            counts[b1 * d + slot] = static_cast<long>(blk.size());
            ++slot;
        }
    }
    return counts;
}

WeightVector empirical_level2_weights(const UnicriticalMap& f, const std::vector<BigRat>& T,
                                      unsigned long long p) {
    if (T.empty()) throw precondition_error("empirical_level2_weights: empty point set");
    std::vector<long> counts = level2_counts(f, T, p);
    WeightVector w;
    w.d = f.d;
    w.level = 2;
    for (long cnt : counts) w.weights.push_back(BigRat(cnt, static_cast<long>(T.size())));
    w.validate();
    return w;
}

double slice_fraction(const UnicriticalMap& f, const std::set<unsigned long long>& S,
                      const std::optional<std::set<unsigned long long>>& Sigma) {
    std::set<unsigned long long> sigma;
    if (Sigma) {
        sigma = *Sigma;
    } else {
        for (unsigned long long p : f.bad_primes)
            if (!f.divides_degree(p)) sigma.insert(p);
    }
    auto lambda_of = [&](unsigned long long p) {
        long long v = f.is_bad(p) ? f.vp_c(p) : 0;
        return v < 0 ? static_cast<double>(-v) * std::log(static_cast<double>(p)) : 0.0;
    };
    for (unsigned long long p : S)
        if (!sigma.count(p))
            throw precondition_error("slice_fraction: " + std::to_string(p) +
                                     " is not among the primes sliced over");
    double den = 0.0;
    for (unsigned long long p : sigma) den += lambda_of(p);
    if (den == 0.0) throw precondition_error("slice_fraction: no bad-reduction weight in Sigma");
    double num = 0.0;
    for (unsigned long long p : S) num += lambda_of(p);
    return num / den;
}

double diameter_capacity_margin(const UnicriticalMap& f, const std::vector<BigRat>& T,
                                unsigned long long p) {
    require_tree_place(f, p);
    const long e = static_cast<long>(-f.vp_c(p));
    LogNumber diam = transfinite_diameter(T, Place::finite(p));
    BigRat q_diam = diam.finite_exponent(p) / BigRat(e);  // in units of log|c|_p
    BigRat q_cap = capacity_exponent_limit(empirical_level2_weights(f, T, p), f, p);
    return (q_diam - q_cap).to_double();
}

}  // namespace preperlab
