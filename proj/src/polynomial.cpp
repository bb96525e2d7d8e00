#include "preperlab/polynomial.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "preperlab/places.hpp"

namespace preperlab {

namespace {

std::vector<BigRat> poly_mul(const std::vector<BigRat>& a, const std::vector<BigRat>& b) {
    std::vector<BigRat> out(a.size() + b.size() - 1, BigRat(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

}  // namespace

std::vector<BigRat> iterate_coeffs(int d, const BigRat& c, int iterations) {
    if (d < 2) throw precondition_error("iterate_coeffs: need degree >= 2");
    if (iterations < 1) throw precondition_error("iterate_coeffs: need iterations >= 1");
    // f(z) = z^d + c, low degree first
    std::vector<BigRat> g(d + 1, BigRat(0));
    g[0] = c;
    g[d] = BigRat(1);
    for (int n = 1; n < iterations; ++n) {
        std::vector<BigRat> pw = g;
        for (int k = 1; k < d; ++k) pw = poly_mul(pw, g);
        pw[0] += c;
        g = std::move(pw);
    }
    return g;
}

std::vector<Cplx> to_complex_coeffs(const std::vector<BigRat>& coeffs) {
    std::vector<Cplx> out;
    out.reserve(coeffs.size());
    for (const auto& q : coeffs) out.emplace_back(q.to_double(), 0.0);
    return out;
}

Cplx eval_poly(const std::vector<Cplx>& coeffs, Cplx z) {
    Cplx acc = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) acc = acc * z + coeffs[i];
    return acc;
}

std::vector<Cplx> durand_kerner(const std::vector<Cplx>& monic_coeffs, int max_iter, double tol) {
    if (monic_coeffs.empty()) throw precondition_error("durand_kerner: empty polynomial");
    const size_t n = monic_coeffs.size() - 1;
    if (n == 0) return {};
    if (std::abs(monic_coeffs.back() - Cplx(1.0, 0.0)) > 1e-12)
        throw precondition_error("durand_kerner: polynomial is not monic");
    if (n == 1) return {-monic_coeffs[0]};

    // Fujiwara bound 2 max |a_{n-k}|^{1/k} keeps the start circle outside no
    // root's reach while scaling like the roots themselves
    double radius = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double a = std::abs(monic_coeffs[i]);
        if (a > 0.0) radius = std::max(radius, std::pow(a, 1.0 / static_cast<double>(n - i)));
    }
    radius = std::max(2.0 * radius, 0.5);

    std::vector<Cplx> x(n);
    const double phase0 = 0.4;  // keep guesses off the real axis
    for (size_t k = 0; k < n; ++k) {
        double theta = phase0 + 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
        x[k] = radius * Cplx(std::cos(theta), std::sin(theta));
    }

    // Horner error bound: |computed p(x) - p(x)| <= 2n eps sum |a_i| |x|^i.
    // A root whose residual sits below that floor cannot improve in doubles.
    auto noise_floor = [&](const Cplx& z) {
        double az = std::abs(z), acc = 1.0;
        for (size_t i = monic_coeffs.size() - 1; i-- > 0;)
            acc = acc * az + std::abs(monic_coeffs[i]);
        return 2.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * acc;
    };

    for (int it = 0; it < max_iter; ++it) {
        bool all_converged = true;
        for (size_t k = 0; k < n; ++k) {
            Cplx denom = 1.0;
            for (size_t j = 0; j < n; ++j)
                if (j != k) denom *= (x[k] - x[j]);
            if (std::abs(denom) < 1e-290) {
                // coincident iterates: nudge and retry next sweep
                x[k] += Cplx(1e-8, 1e-8);
                all_converged = false;
                continue;
            }
            Cplx value = eval_poly(monic_coeffs, x[k]);
            Cplx delta = value / denom;
            x[k] -= delta;
            if (std::abs(delta) >= tol * std::max(1.0, std::abs(x[k])) &&
                std::abs(value) > noise_floor(x[k]))
                all_converged = false;
        }
        if (all_converged) {
            // guarded Newton polish, then done
            std::vector<Cplx> deriv(n);
            for (size_t i = 1; i <= n; ++i)
                deriv[i - 1] = monic_coeffs[i] * static_cast<double>(i);
            for (size_t k = 0; k < n; ++k) {
                for (int step = 0; step < 3; ++step) {
                    Cplx dp = eval_poly(deriv, x[k]);
                    if (std::abs(dp) < 1e-200) break;
                    Cplx delta = eval_poly(monic_coeffs, x[k]) / dp;
                    if (std::abs(delta) > 0.1 * (1.0 + std::abs(x[k]))) break;
                    x[k] -= delta;
                }
            }
            return x;
        }
    }
    throw cap_error("durand_kerner: no convergence within " + std::to_string(max_iter) + " sweeps");
}

}  // namespace preperlab
