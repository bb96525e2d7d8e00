#include "preperlab/factorize.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace preperlab {

namespace {

constexpr uint64_t kSieveLimit = 1000000;

const std::vector<uint32_t>& small_primes() {
    static const std::vector<uint32_t> primes = [] {
        std::vector<bool> composite(kSieveLimit + 1, false);
        std::vector<uint32_t> out;
        for (uint64_t i = 2; i <= kSieveLimit; ++i) {
            if (composite[i]) continue;
            out.push_back(static_cast<uint32_t>(i));
            for (uint64_t j = i * i; j <= kSieveLimit; j += i) composite[j] = true;
        }
        return out;
    }();
    return primes;
}

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// Brent's cycle-finding variant of Pollard rho; n must be an odd composite
// with no prime factor below the sieve limit.
uint64_t brent_rho(uint64_t n) {
    for (uint64_t c0 = 1;; ++c0) {
        uint64_t y = 2, c = c0, m = 128;
        uint64_t g = 1, r = 1, q = 1, x = 0, ys = 0;
        while (g == 1) {
            x = y;
            for (uint64_t i = 0; i < r; ++i) y = (mulmod(y, y, n) + c) % n;
            for (uint64_t k = 0; k < r && g == 1; k += m) {
                ys = y;
                uint64_t lim = std::min(m, r - k);
                for (uint64_t i = 0; i < lim; ++i) {
                    y = (mulmod(y, y, n) + c) % n;
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
            }
            r <<= 1;
        }
        if (g == n) {
            g = 1;
            while (g == 1) {
                ys = (mulmod(ys, ys, n) + c) % n;
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            }
        }
        if (g != n) return g;
        // cycle collapsed onto n itself; retry with a different shift
    }
}

void factor_u64_into(uint64_t n, FactorMap& out) {
    for (uint32_t p : small_primes()) {
        if (static_cast<uint64_t>(p) * p > n) break;
        while (n % p == 0) {
            ++out[p];
            n /= p;
        }
    }
    if (n == 1) return;
    if (is_prime_u64(n)) {
        ++out[n];
        return;
    }
    uint64_t d = brent_rho(n);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

}  // namespace

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // this witness set is deterministic for every 64-bit input
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

FactorMap factorize(uint64_t n) {
    if (n < 1) throw std::invalid_argument("factorize: need n >= 1");
    FactorMap out;
    if (n > 1) factor_u64_into(n, out);
    return out;
}

FactorMap factorize(const mpz_class& n) {
    if (sgn(n) < 1) throw std::invalid_argument("factorize: need n >= 1");
    if (n.fits_ulong_p()) return factorize(static_cast<uint64_t>(n.get_ui()));

    FactorMap out;
    mpz_class rem = n;
    for (uint32_t p : small_primes()) {
        if (mpz_divisible_ui_p(rem.get_mpz_t(), p)) {
            unsigned int e = 0;
            while (mpz_divisible_ui_p(rem.get_mpz_t(), p)) {
                mpz_divexact_ui(rem.get_mpz_t(), rem.get_mpz_t(), p);
                ++e;
            }
            out[p] = e;
        }
        if (rem == 1) return out;
    }
    if (rem.fits_ulong_p()) {
        FactorMap tail = factorize(static_cast<uint64_t>(rem.get_ui()));
        for (auto& [p, e] : tail) out[p] += e;
        return out;
    }
    // The cofactor left after stripping everything below 10^6 does not fit in
    // 64 bits.  Downstream consumers need certified primes, so refuse instead
    // of handing back a probable-prime.
    throw std::overflow_error("factorize: cofactor exceeds 64 bits: " + rem.get_str());
}

}  // namespace preperlab
