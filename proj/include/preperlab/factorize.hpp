#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>

namespace preperlab {

// prime -> exponent, exponents always >= 1
using FactorMap = std::map<unsigned long long, unsigned int>;

bool is_prime_u64(std::uint64_t n);

// Full factorization of n >= 1 (empty map for n == 1).  Trial division by all
// primes below 10^6, then deterministic Miller-Rabin plus Brent's cycle rho on
// the cofactor.  Throws std::invalid_argument for n < 1 and std::overflow_error
// if a prime factor does not fit in 64 bits (inputs here are corpus-sized).
FactorMap factorize(const mpz_class& n);
FactorMap factorize(std::uint64_t n);

}  // namespace preperlab
