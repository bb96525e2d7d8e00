#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "preperlab/heights_abc.hpp"
#include "preperlab/julia_geometry.hpp"

namespace preperlab {

/*
 * Family of maps z^d + c with c = a/b in lowest terms, |a| <= numerator_bound,
 * b drawn from the denominator list.  Denominators that are not d-th powers
 * are dropped (no rational preperiodic point can exist over them).
 */
struct CorpusSpec {
    std::vector<int> degrees = {2};
    long numerator_bound = 50;
    std::vector<long> denominators = {1, 4, 16};
    std::vector<BigRat> exclusions;
};

std::vector<UnicriticalMap> generate_corpus(const CorpusSpec& spec);

struct RunConfig {
    int n_max_escape = 20;
    std::vector<BigRat> epsilons = {BigRat(1, 2)};
    long adelic_num_div = 600;
    long adelic_arch_div = 800;
    std::uint64_t seed = 1;
    int workers = 1;
    long tuple_budget = 20000;
};

struct ScanRow {
    int d = 2;
    BigRat c;
    size_t portrait_size = 0;
    int max_period = 0;
    double pair_height_margin = 0.0;   // NaN when < 2 points
    size_t coprimality_violations = 0;
    std::string quantization;          // "none", or "p:ok" / "p:FAIL" joined by ';'
    double diameter_residual = 0.0;    // NaN when < 2 points
    double top_quality = 0.0;          // NaN when no tuple was constructible
    double min_triple_gap = 0.0;       // NaN when no same-period pair exists
};

// A portrait with >= 8 points whose level-2 occupancies fail the eps = 1/2
// band at a tree prime is expected to have penalized diameter
// log d_p / lambda_p < 0; anything else is recorded here.
struct EquidPenaltyRecord {
    BigRat c;
    unsigned long long p = 0;
    double log_dv_over_lambda = 0.0;
};

struct ScanSummary {
    std::vector<ScanRow> rows;
    size_t maps_scanned = 0;
    size_t portraits_nonempty = 0;
    size_t quantization_violations = 0;
    size_t coprimality_violations = 0;
    size_t equid_checks = 0;  // (map, prime) pairs eligible for the penalty check
    std::vector<EquidPenaltyRecord> equid_penalty_violations;
    double adelic_fraction_overall = 0.0;  // over all portrait differences with h(c) > 0
};

ScanSummary scan_corpus(const CorpusSpec& spec, const RunConfig& config);

// Fixed column order, documented in the CLI help.
std::string scan_csv(const ScanSummary& s);
nlohmann::json scan_json(const ScanSummary& s);

// 12 significant digits, the fixed text form for reals in reports.
std::string fmt_real(double x);

}  // namespace preperlab
