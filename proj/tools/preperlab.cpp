#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "preperlab/corpus.hpp"

using namespace preperlab;

namespace {

int env_workers() {
    const char* env = std::getenv("PREPERLAB_WORKERS");
    if (!env) return 1;
    int w = std::atoi(env);
    return w >= 1 ? w : 1;
}

// Lets option values that start with a minus sign (negative rationals,
// exponents, zeta = -1) through CLI11 by rewriting "-c -29/16" as "-c=-29/16".
std::vector<std::string> glue_negative_values(int argc, char** argv) {
    const std::vector<std::string> takes_value = {"-c", "--param", "--vp-c", "--zeta",
                                                  "--xi", "--exclude"};
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        bool glued = false;
        for (const std::string& opt : takes_value) {
            if (a == opt && i + 1 < argc) {
                std::string next = argv[i + 1];
                if (next.size() >= 2 && next[0] == '-' &&
                    (std::isdigit(static_cast<unsigned char>(next[1])) || next[1] == '.')) {
                    // long options take '=value', short ones attach the value directly
                    args.push_back(opt.rfind("--", 0) == 0 ? a + "=" + next : a + next);
                    ++i;
                    glued = true;
                    break;
                }
            }
        }
        if (!glued) args.push_back(a);
    }
    return args;
}

std::vector<BigRat> parse_weights(const std::string& text, int d) {
    std::vector<BigRat> w;
    std::string cur;
    for (char ch : text) {
        if (ch == ',') {
            w.push_back(BigRat::parse(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) w.push_back(BigRat::parse(cur));
    size_t want = 1;
    for (int i = 0; i < 2; ++i) want *= static_cast<size_t>(d);
    if (w.size() != want)
        throw std::invalid_argument("capacity: need exactly d^2 = " + std::to_string(want) +
                                    " level-2 weights, got " + std::to_string(w.size()));
    return w;
}

nlohmann::json quality_json(const TupleScan& scan, const std::string& kind) {
    nlohmann::json j;
    j["schema"] = 1;
    j["kind"] = kind;
    j["scanned"] = scan.scanned;
    j["degenerate_skipped"] = scan.degenerate_skipped;
    j["full_enumeration"] = scan.full_enumeration;
    j["adelic_fraction"] = scan.adelic_fraction;
    j["max_pair_height_margin"] = scan.max_pair_height_margin;
    j["min_triple_gap"] = scan.min_triple_gap;
    nlohmann::json top = nlohmann::json::array();
    for (const QualityReport& r : scan.top) top.push_back(r.to_json());
    j["top"] = top;
    return j;
}

void print_scan_text(const TupleScan& scan, const std::string& kind) {
    std::cout << kind << ": scanned " << scan.scanned << " tuples ("
              << scan.degenerate_skipped << " degenerate skipped, "
              << (scan.full_enumeration ? "full enumeration" : "seeded sample") << ")\n";
    std::cout << "adelic fraction over portrait pairs: " << fmt_real(scan.adelic_fraction)
              << "\n";
    std::cout << "max pair height margin: " << fmt_real(scan.max_pair_height_margin) << "\n";
    std::cout << "min triple gap: " << fmt_real(scan.min_triple_gap) << "\n";
    int rank = 1;
    for (const QualityReport& r : scan.top) {
        std::cout << rank++ << ". quality " << fmt_real(r.quality) << "  h " << fmt_real(r.h)
                  << "  rad " << fmt_real(r.rad) << "  slice " << fmt_real(r.equal_sides_slice)
                  << "  coords";
        for (const BigRat& x : r.tuple.coords) std::cout << ' ' << x.str();
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"preperlab: exact rational preperiodic structures of z^d + c"};
    app.require_subcommand(1);
    app.fallthrough();

    bool as_json = false;
    std::string csv_path;
    std::uint64_t seed = 1;
    int workers = env_workers();
    int n_max = 20;
    app.add_flag("--json", as_json, "emit a JSON report instead of text/CSV");
    app.add_option("--csv", csv_path, "also write scan CSV to this path");
    app.add_option("--seed", seed, "seed for sampled tuple scans");
    app.add_option("--workers", workers,
                   "worker threads across corpus entries (default: PREPERLAB_WORKERS or 1)");
    app.add_option("--n-max", n_max, "iteration cap for escape-rate computations");

    auto* cmd_portrait =
        app.add_subcommand("portrait", "rational preperiodic portrait of z^d + c");
    int portrait_d = 2;
    std::string portrait_c;
    cmd_portrait->add_option("-d,--degree", portrait_d, "degree d >= 2")->required();
    cmd_portrait->add_option("-c,--param", portrait_c, "parameter c, e.g. -29/16")->required();
    cmd_portrait->callback([&]() {
        UnicriticalMap f(portrait_d, BigRat::parse(portrait_c));
        nlohmann::json j = find_preperiodic(f).to_json();
        j["schema"] = 1;
        std::cout << j.dump(2) << "\n";
    });

    auto* cmd_geometry = app.add_subcommand(
        "geometry", "disk-tree geometry of the portrait at a bad prime p (p must not divide d)");
    int geom_d = 2;
    std::string geom_c;
    unsigned long long geom_p = 0;
    cmd_geometry->add_option("-d,--degree", geom_d, "degree d >= 2")->required();
    cmd_geometry->add_option("-c,--param", geom_c, "parameter c")->required();
    cmd_geometry->add_option("-p,--prime", geom_p, "bad prime not dividing d")->required();
    cmd_geometry->callback([&]() {
        UnicriticalMap f(geom_d, BigRat::parse(geom_c));
        require_tree_place(f, geom_p);
        Portrait portrait = find_preperiodic(f);
        std::vector<BigRat> pts = portrait.points();

        nlohmann::json j;
        j["schema"] = 1;
        j["p"] = geom_p;
        j["vp_c"] = f.vp_c(geom_p);
        j["portrait_size"] = pts.size();
        if (pts.size() < 2) {
            j["note"] = "portrait has fewer than 2 points; pairwise geometry is empty";
            j["quantization"] = "pass";
            j["clusters"] = nlohmann::json::object();
            j["equid"] = nullptr;
            j["log_dv_over_lambda"] = nullptr;
            j["idealization_margin"] = nullptr;
        } else {
            QuantizationReport rep = quantization_check(f, pts, geom_p);
            if (rep.pass) {
                j["quantization"] = "pass";
            } else {
                nlohmann::json viols = nlohmann::json::array();
                for (const QuantizationEntry& e : rep.violations)
                    viols.push_back({{"i", e.i}, {"j", e.j}, {"k", e.k.str()}});
                j["quantization"] = viols;
            }
            nlohmann::json clusters = nlohmann::json::object();
            for (int m = 1; m <= 2; ++m) {
                nlohmann::json blocks = nlohmann::json::array();
                for (const auto& block : cluster_at_level(f, pts, geom_p, m)) {
                    nlohmann::json b = nlohmann::json::array();
                    for (const BigRat& z : block) b.push_back(z.str());
                    blocks.push_back(b);
                }
                clusters[std::to_string(m)] = blocks;
            }
            j["clusters"] = clusters;
            std::vector<long> counts = level2_counts(f, pts, geom_p);
            EquidistributionReport eq =
                epsilon_equidistribution(counts, static_cast<long>(pts.size()), BigRat(1, 2));
            j["equid"] = {{"eps", 0.5}, {"counts", counts}, {"pass", eq.pass}};
            double lambda = static_cast<double>(-f.vp_c(geom_p)) *
                            std::log(static_cast<double>(geom_p));
            j["log_dv_over_lambda"] =
                transfinite_diameter(pts, Place::finite(geom_p)).real() / lambda;
            j["idealization_margin"] = diameter_capacity_margin(f, pts, geom_p);
        }
        std::cout << j.dump(2) << "\n";
    });

    auto* cmd_capacity = app.add_subcommand(
        "capacity", "exact weighted energies and refinement residuals on the disk tree");
    int cap_d = 2;
    long cap_vpc = -2;
    std::string cap_k2;
    int cap_mmax = 5;
    cmd_capacity->add_option("-d,--degree", cap_d, "degree d >= 2")->required();
    cmd_capacity->add_option("--vp-c", cap_vpc, "v_p(c) < 0 with d | -v_p(c)")->required();
    cmd_capacity->add_option("--k2", cap_k2,
                             "comma-separated d^2 level-2 weights (default: uniform)");
    cmd_capacity->add_option("--m-max", cap_mmax, "deepest refinement level (>= 2)");
    cmd_capacity->callback([&]() {
        if (cap_d < 2) throw precondition_error("capacity: need degree >= 2");
        if (cap_vpc >= 0) throw precondition_error("capacity: v_p(c) must be negative");
        if ((-cap_vpc) % cap_d != 0)
            throw precondition_error("capacity: d must divide -v_p(c)");
        if (cap_mmax < 2) throw std::invalid_argument("capacity: --m-max must be >= 2");
        WeightVector k2 = cap_k2.empty()
                              ? uniform_weights(cap_d)
                              : WeightVector{cap_d, 2, parse_weights(cap_k2, cap_d)};
        k2.validate();

        std::vector<std::string> ms, energies, residuals;
        for (int m = 2; m <= cap_mmax; ++m) {
            ms.push_back(std::to_string(m));
            energies.push_back(energy_exponent(refine_weights(k2, m)).str());
            residuals.push_back(telescoping_residual(k2, m).str());
        }
        BigRat limit = capacity_exponent_limit(k2);
        if (as_json) {
            nlohmann::json j;
            j["schema"] = 1;
            j["d"] = cap_d;
            j["vp_c"] = cap_vpc;
            nlohmann::json kj = nlohmann::json::array();
            for (const BigRat& w : k2.weights) kj.push_back(w.str());
            j["k2"] = kj;
            nlohmann::json rows = nlohmann::json::array();
            for (size_t i = 0; i < ms.size(); ++i)
                rows.push_back({{"m", ms[i]}, {"energy", energies[i]}, {"residual", residuals[i]}});
            j["rows"] = rows;
            j["limit_capacity_exponent"] = limit.str();
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "all exact, in units of lambda_v(c) = -v_p(c) log p\n";
            std::cout << "m\tenergy\tresidual(m->m+1)\n";
            for (size_t i = 0; i < ms.size(); ++i)
                std::cout << ms[i] << '\t' << energies[i] << '\t' << residuals[i] << "\n";
            std::cout << "limit capacity exponent: " << limit.str() << "\n";
        }
    });

    auto* cmd_hexagons =
        app.add_subcommand("hexagons", "sum-zero hexagons from portrait points, ranked by quality");
    int hex_d = 2;
    std::string hex_c;
    long hex_budget = 20000;
    cmd_hexagons->add_option("-d,--degree", hex_d, "degree d >= 2")->required();
    cmd_hexagons->add_option("-c,--param", hex_c, "parameter c")->required();
    cmd_hexagons->add_option("--budget", hex_budget, "max tuples to evaluate");
    cmd_hexagons->callback([&]() {
        UnicriticalMap f(hex_d, BigRat::parse(hex_c));
        Portrait portrait = find_preperiodic(f);
        TupleScan scan = hexagon_scan(f, portrait, hex_budget, seed);
        if (as_json)
            std::cout << quality_json(scan, "hexagon-scan").dump(2) << "\n";
        else
            print_scan_text(scan, "hexagons");
    });

    auto* cmd_triples = app.add_subcommand(
        "abc-triples", "abc triples (p1^d, -p2^d, -(f(p1)-f(p2))) from same-period cycle points");
    int tri_d = 2;
    std::string tri_c;
    double tri_xi = 0.0;
    cmd_triples->add_option("-d,--degree", tri_d, "degree d >= 2")->required();
    cmd_triples->add_option("-c,--param", tri_c, "parameter c")->required();
    cmd_triples->add_option("--xi", tri_xi, "gap parameter xi in [0, d-1)");
    cmd_triples->callback([&]() {
        UnicriticalMap f(tri_d, BigRat::parse(tri_c));
        Portrait portrait = find_preperiodic(f);
        TupleScan scan = abc_triple_scan(f, portrait, tri_xi);
        if (as_json)
            std::cout << quality_json(scan, "abc-triple-scan").dump(2) << "\n";
        else
            print_scan_text(scan, "abc triples");
    });

    auto* cmd_scan = app.add_subcommand(
        "scan",
        "corpus scan; CSV columns: d,c,portrait_size,max_period,pair_height_margin,"
        "coprimality_violations,quantization,diameter_residual,top_quality,min_triple_gap");
    std::vector<int> scan_degrees = {2};
    long scan_amax = 50;
    std::vector<long> scan_dens = {1, 4, 16};
    std::vector<std::string> scan_excludes;
    long scan_budget = 20000;
    long scan_num_div = 600, scan_arch_div = 800;
    cmd_scan->add_option("--degrees", scan_degrees, "degrees to scan")->delimiter(',');
    cmd_scan->add_option("--a-max", scan_amax, "numerator bound |a| <= a-max");
    cmd_scan->add_option("--denominators", scan_dens,
                         "denominators b (non d-th powers are dropped)")
        ->delimiter(',');
    cmd_scan->add_option("--exclude", scan_excludes, "c values to skip")->delimiter(',');
    cmd_scan->add_option("--budget", scan_budget, "tuple budget per map");
    cmd_scan->add_option("--adelic-num-div", scan_num_div, "good-prime divisor threshold");
    cmd_scan->add_option("--adelic-arch-div", scan_arch_div, "archimedean divisor threshold");
    cmd_scan->callback([&]() {
        CorpusSpec spec;
        spec.degrees = scan_degrees;
        spec.numerator_bound = scan_amax;
        spec.denominators = scan_dens;
        for (const std::string& e : scan_excludes) spec.exclusions.push_back(BigRat::parse(e));
        RunConfig cfg;
        cfg.n_max_escape = n_max;
        cfg.adelic_num_div = scan_num_div;
        cfg.adelic_arch_div = scan_arch_div;
        cfg.seed = seed;
        cfg.workers = workers;
        cfg.tuple_budget = scan_budget;
        ScanSummary summary = scan_corpus(spec, cfg);
        if (!csv_path.empty()) {
            std::ofstream out(csv_path);
            if (!out) throw std::invalid_argument("scan: cannot open CSV path " + csv_path);
            out << scan_csv(summary);
        }
        if (as_json)
            std::cout << scan_json(summary).dump(2) << "\n";
        else
            std::cout << scan_csv(summary);
    });

    std::vector<std::string> args = glue_negative_values(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 parses reversed vectors
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const precondition_error& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 3;
    } catch (const cap_error& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
