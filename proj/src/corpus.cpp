#include "preperlab/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace preperlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_dth_power(long b, int d) {
    mpz_class root, bz(b);
    return mpz_root(root.get_mpz_t(), bz.get_mpz_t(), static_cast<unsigned long>(d)) != 0;
}

}  // namespace

std::vector<UnicriticalMap> generate_corpus(const CorpusSpec& spec) {
    if (spec.degrees.empty()) throw precondition_error("corpus: degree list is empty");
    if (spec.denominators.empty()) throw precondition_error("corpus: denominator list is empty");
    if (spec.numerator_bound < 0) throw precondition_error("corpus: numerator bound is negative");
    for (int d : spec.degrees)
        if (d < 2) throw precondition_error("corpus: degrees must be at least 2");
    for (long b : spec.denominators)
        if (b < 1) throw precondition_error("corpus: denominators must be positive");

    std::vector<UnicriticalMap> maps;
    for (int d : spec.degrees) {
        for (long b : spec.denominators) {
            if (!is_dth_power(b, d)) continue;
            for (long a = -spec.numerator_bound; a <= spec.numerator_bound; ++a) {
                if (std::gcd(std::labs(a), b) != 1) continue;
                BigRat c(a, b);
                if (std::find(spec.exclusions.begin(), spec.exclusions.end(), c) !=
                    spec.exclusions.end())
                    continue;
                maps.emplace_back(d, c);
            }
        }
    }
    return maps;
}

namespace {

struct MapResult {
    ScanRow row;
    bool nonempty = false;
    size_t quantization_fails = 0;
    size_t coprimality_fails = 0;
    size_t equid_checks = 0;
    std::vector<EquidPenaltyRecord> penalties;
    size_t adelic_pass = 0;
    size_t adelic_total = 0;
};

MapResult scan_one(const UnicriticalMap& f, const RunConfig& cfg) {
    MapResult r;
    Portrait portrait = find_preperiodic(f);
    std::vector<BigRat> pts = portrait.points();

    r.row.d = f.d;
    r.row.c = f.c;
    r.row.portrait_size = portrait.size();
    r.row.max_period = portrait.max_period();
    r.nonempty = !pts.empty();

    r.row.pair_height_margin = pair_height_margin_max(f, portrait);
    r.row.coprimality_violations = newton_coprimality_violations(f, portrait).size();
    r.coprimality_fails = r.row.coprimality_violations;

    std::string quant;
    for (unsigned long long p : f.bad_primes) {
        if (f.divides_degree(p)) continue;
        long long e = -f.vp_c(p);
        if (e % f.d != 0) continue;
        QuantizationReport rep = quantization_check(f, pts, p);
        if (!rep.pass) r.quantization_fails += rep.violations.size();
        if (!quant.empty()) quant += ';';
        quant += std::to_string(p) + (rep.pass ? ":ok" : ":FAIL");

        if (pts.size() >= 8) {
            ++r.equid_checks;
            std::vector<long> counts = level2_counts(f, pts, p);
            EquidistributionReport eq = epsilon_equidistribution(
                counts, static_cast<long>(pts.size()), BigRat(1, 2));
            if (!eq.pass) {
                double lambda = static_cast<double>(e) * std::log(static_cast<double>(p));
                double ratio = transfinite_diameter(pts, Place::finite(p)).real() / lambda;
                if (!(ratio < 0.0)) r.penalties.push_back({f.c, p, ratio});
            }
        }
    }
    r.row.quantization = quant.empty() ? "none" : quant;

    r.row.diameter_residual = pts.size() >= 2 ? global_diameter_residual(pts) : kNaN;

    double top = kNaN;
    if (pts.size() >= 5) {
        TupleScan hs = hexagon_scan(f, portrait, cfg.tuple_budget, cfg.seed,
                                    cfg.adelic_num_div, cfg.adelic_arch_div);
        if (!hs.top.empty()) top = hs.top.front().quality;
    }
    try {
        TupleScan ts = abc_triple_scan(f, portrait, 0.0, cfg.adelic_num_div, cfg.adelic_arch_div);
        if (!ts.top.empty()) {
            double q = ts.top.front().quality;
            if (!std::isnan(q) && (std::isnan(top) || q > top)) top = q;
        }
    } catch (const precondition_error&) {
        // no same-period pair: triples contribute nothing
    }
    r.row.top_quality = top;

    double min_gap = kNaN;
    for (const auto& [period, cycle_pts] : portrait.cycles()) {
        for (size_t i = 0; i < cycle_pts.size(); ++i)
            for (size_t j = i + 1; j < cycle_pts.size(); ++j) {
                if (f.apply(cycle_pts[i]) == f.apply(cycle_pts[j])) continue;
                double gap = triple_height_gap(f, portrait, cycle_pts[i], cycle_pts[j], 0.0);
                if (std::isnan(min_gap) || gap < min_gap) min_gap = gap;
            }
    }
    r.row.min_triple_gap = min_gap;

    if (f.h_c > 0.0) {
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j) {
                ++r.adelic_total;
                if (is_adelically_good(pts[i] - pts[j], f, cfg.adelic_num_div,
                                       cfg.adelic_arch_div)
                        .passes)
                    ++r.adelic_pass;
            }
    }
    return r;
}

}  // namespace

ScanSummary scan_corpus(const CorpusSpec& spec, const RunConfig& config) {
    if (config.n_max_escape < 1) throw precondition_error("scan: escape cap must be at least 1");
    if (config.adelic_num_div <= 0 || config.adelic_arch_div <= 0)
        throw precondition_error("scan: adelic thresholds must be positive");
    if (config.workers < 1) throw precondition_error("scan: worker count must be at least 1");
    if (config.tuple_budget < 0) throw precondition_error("scan: tuple budget must be nonnegative");

    std::vector<UnicriticalMap> maps = generate_corpus(spec);
    std::vector<MapResult> results(maps.size());

    int workers = static_cast<int>(
        std::min<size_t>(static_cast<size_t>(config.workers), maps.size()));
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&]() {
        for (size_t i = next.fetch_add(1); i < maps.size(); i = next.fetch_add(1)) {
            try {
                results[i] = scan_one(maps[i], config);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    ScanSummary s;
    size_t adelic_pass = 0, adelic_total = 0;
    for (MapResult& r : results) {
        s.rows.push_back(std::move(r.row));
        ++s.maps_scanned;
        if (r.nonempty) ++s.portraits_nonempty;
        s.quantization_violations += r.quantization_fails;
        s.coprimality_violations += r.coprimality_fails;
        s.equid_checks += r.equid_checks;
        for (EquidPenaltyRecord& rec : r.penalties)
            s.equid_penalty_violations.push_back(std::move(rec));
        adelic_pass += r.adelic_pass;
        adelic_total += r.adelic_total;
    }
    s.adelic_fraction_overall =
        adelic_total > 0 ? static_cast<double>(adelic_pass) / static_cast<double>(adelic_total)
                         : kNaN;
    return s;
}

std::string fmt_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

std::string scan_csv(const ScanSummary& s) {
    std::string out =
        "d,c,portrait_size,max_period,pair_height_margin,coprimality_violations,"
        "quantization,diameter_residual,top_quality,min_triple_gap\n";
    for (const ScanRow& r : s.rows) {
        out += std::to_string(r.d) + ',' + r.c.str() + ',' + std::to_string(r.portrait_size) +
               ',' + std::to_string(r.max_period) + ',' + fmt_real(r.pair_height_margin) + ',' +
               std::to_string(r.coprimality_violations) + ',' + r.quantization + ',' +
               fmt_real(r.diameter_residual) + ',' + fmt_real(r.top_quality) + ',' +
               fmt_real(r.min_triple_gap) + '\n';
    }
    return out;
}

nlohmann::json scan_json(const ScanSummary& s) {
    nlohmann::json j;
    j["schema"] = 1;
    j["maps_scanned"] = s.maps_scanned;
    j["portraits_nonempty"] = s.portraits_nonempty;
    j["quantization_violations"] = s.quantization_violations;
    j["coprimality_violations"] = s.coprimality_violations;
    j["equid_checks"] = s.equid_checks;
    nlohmann::json penalties = nlohmann::json::array();
    for (const EquidPenaltyRecord& r : s.equid_penalty_violations) {
        penalties.push_back({{"c", r.c.str()},
                             {"p", r.p},
                             {"log_dv_over_lambda", r.log_dv_over_lambda}});
    }
    j["equid_penalty_violations"] = penalties;
    j["adelic_fraction_overall"] = s.adelic_fraction_overall;
    nlohmann::json rows = nlohmann::json::array();
    for (const ScanRow& r : s.rows) {
        rows.push_back({{"d", r.d},
                        {"c", r.c.str()},
                        {"portrait_size", r.portrait_size},
                        {"max_period", r.max_period},
                        {"pair_height_margin", r.pair_height_margin},
                        {"coprimality_violations", r.coprimality_violations},
                        {"quantization", r.quantization},
                        {"diameter_residual", r.diameter_residual},
                        {"top_quality", r.top_quality},
                        {"min_triple_gap", r.min_triple_gap}});
    }
    j["rows"] = rows;
    return j;
}

}  // namespace preperlab
