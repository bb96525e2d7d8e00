#pragma once

#include <optional>
#include <set>
#include <vector>

#include "preperlab/dynamics.hpp"

namespace preperlab {

/*
 * Non-archimedean geometry of the filled Julia set of z^d + c at a bad prime
 * p not dividing d.  With e = -v_p(c) > 0 and d | e, the m-th preimage of the
 * closed disk of radius |c|^{1/d} around 0 consists of d^m disks of radius
 * exponent (1 - m(d-1))/d in units of log|c|_p; two level-m disks whose
 * deepest common ancestor sits at level l are at distance exponent
 * (1 - l(d-1))/d.  All of this is exact rational arithmetic on exponents.
 */

// (1 - l(d-1))/d, the distance/radius exponent at level l.
BigRat level_exponent(int d, int level);

// Modulus of the fundamental annulus between consecutive levels: (d-1)/d.
BigRat annulus_modulus(int d);

struct ValMatrix {
    std::vector<BigRat> points;
    std::vector<std::vector<PadicValuation>> entries;  // diagonal = infinity

    bool ultrametric_ok() const;
};

// Pairwise v_p(z_i - z_j); duplicate points are refused.
ValMatrix pairwise_valuation_matrix(const std::vector<BigRat>& T, unsigned long long p);

struct QuantizationEntry {
    size_t i, j;
    BigRat k;  // level index solved from the valuation; integral >= 0 iff allowed
};

struct QuantizationReport {
    bool pass = true;
    std::vector<QuantizationEntry> entries;     // all pairs i < j
    std::vector<QuantizationEntry> violations;  // non-integral or negative k
};

// Checks that every pairwise distance sits on the discrete ladder
// |c|^{(1 - k(d-1))/d}, k = 0, 1, 2, ...  Requires p bad, p not dividing d,
// and d | v_p(c) (otherwise precondition_error).
QuantizationReport quantization_check(const UnicriticalMap& f,
                                      const std::vector<BigRat>& T,
                                      unsigned long long p);

// Partition of T into level-m disks: z ~ w iff v_p(z - w) >= exponent of the
// level-m radius.  Blocks are sorted by their smallest element.
std::vector<std::vector<BigRat>> cluster_at_level(const UnicriticalMap& f,
                                                  const std::vector<BigRat>& T,
                                                  unsigned long long p, int m);

struct EquidistributionReport {
    bool pass = true;
    BigRat lower, upper;           // strict bounds (1 +- eps) * n / d^2
    std::vector<long> counts;
    std::vector<bool> bucket_ok;
};

// Strict per-bucket band check over the d^2 level-2 positions.
EquidistributionReport epsilon_equidistribution(const std::vector<long>& counts,
                                                long n, const BigRat& eps);

// (1/(n(n-1))) sum_{i != j} log|z_i - z_j|_v; exact finite exponent at finite
// places.  Needs at least two distinct points.
LogNumber transfinite_diameter(const std::vector<BigRat>& T, const Place& v);

// Sum of the transfinite diameter over all places; 0 up to rounding by the
// product formula applied to each pairwise difference.
double global_diameter_residual(const std::vector<BigRat>& T);

struct WeightVector {
    int d = 2;
    int level = 2;
    std::vector<BigRat> weights;  // size d^level, nonnegative, sum 1

    void validate() const;  // throws std::invalid_argument
};

WeightVector uniform_weights(int d, int level = 2);

// Equal-split refinement from w.level down to level m >= w.level: each node's
// mass is divided evenly among its d^(m - level) descendants.
WeightVector refine_weights(const WeightVector& w, int m);

/*
 * Energy exponent q of the discrete measure mu = sum w_i * delta_{zeta_i}
 * placed at the level-m disk points: I(mu) = q * log|c|_p, where the kernel is
 * -log of the pairwise disk distance and the diagonal takes the disk radius
 * itself.  Computed by aggregating subtree masses level by level.
 */
BigRat energy_exponent(const WeightVector& w);

// energy(m+1 refinement) - energy(m refinement) - (1/d^{m+1} - 1/d^{m+2}),
// exact rational; zero for uniform weights.
BigRat telescoping_residual(const WeightVector& k2, int m);

// Limit capacity exponent via the closed form -I_2 - 1/d^3 (in units of
// log|c|_p); exactly 0 for uniform weights.
BigRat capacity_exponent_limit(const WeightVector& k2);

// Map-level wrappers validating p bad, p not dividing d, d | v_p(c).
void require_tree_place(const UnicriticalMap& f, unsigned long long p);
BigRat telescoping_residual(const WeightVector& k2, const UnicriticalMap& f,
                            unsigned long long p, int m);
BigRat capacity_exponent_limit(const WeightVector& k2, const UnicriticalMap& f,
                               unsigned long long p);

// Occupancy counts of T over the d^2 level-2 tree positions (zeros included),
// placed consistently with the level-1 clustering.
std::vector<long> level2_counts(const UnicriticalMap& f, const std::vector<BigRat>& T,
                                unsigned long long p);

// Empirical level-2 weight vector of T (counts / |T|).
WeightVector empirical_level2_weights(const UnicriticalMap& f,
                                      const std::vector<BigRat>& T,
                                      unsigned long long p);

// Fraction of the bad-reduction weight sum captured by S:
//   sum_{p in S} lambda_p(c) / sum_{p in Sigma} lambda_p(c),
// Sigma defaulting to all bad primes not dividing d.
double slice_fraction(const UnicriticalMap& f, const std::set<unsigned long long>& S,
                      const std::optional<std::set<unsigned long long>>& Sigma = std::nullopt);

// (log d_p(T) - log gamma(mu_{k(T)})) / lambda_p(c) with the empirical level-2
// weights of T; exact rational evaluated at the end.
double diameter_capacity_margin(const UnicriticalMap& f, const std::vector<BigRat>& T,
                                unsigned long long p);

}  // namespace preperlab
