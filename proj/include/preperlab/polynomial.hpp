#pragma once

#include <complex>
#include <vector>

#include "preperlab/bigrat.hpp"

namespace preperlab {

using Cplx = std::complex<double>;

// Dense coefficients (low degree first) of the n-fold self-composition of
// z^d + c.  Exact rational arithmetic; degree d^n.
std::vector<BigRat> iterate_coeffs(int d, const BigRat& c, int iterations);

std::vector<Cplx> to_complex_coeffs(const std::vector<BigRat>& coeffs);

Cplx eval_poly(const std::vector<Cplx>& coeffs, Cplx z);

/*
 * Durand-Kerner simultaneous root iteration for a monic polynomial.
 * Starts from perturbed scaled roots of unity, runs until the largest update
 * drops below tol (then a guarded Newton polish), and throws cap_error if the
 * iteration cap is reached without convergence.
 */
std::vector<Cplx> durand_kerner(const std::vector<Cplx>& monic_coeffs,
                                int max_iter = 500, double tol = 1e-13);

}  // namespace preperlab
