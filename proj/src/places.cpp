#include "preperlab/places.hpp"

#include <cmath>

#include "preperlab/factorize.hpp"

namespace preperlab {

Place Place::finite(unsigned long long prime) {
    if (!is_prime_u64(prime)) throw precondition_error("not a prime: " + std::to_string(prime));
    return Place{Kind::Finite, prime};
}

std::string Place::str() const {
    return is_arch() ? "inf" : std::to_string(p);
}

long long PadicValuation::value() const {
    if (inf_) throw std::logic_error("PadicValuation: value() on infinity");
    return v_;
}

PadicValuation PadicValuation::operator+(const PadicValuation& o) const {
    if (inf_ || o.inf_) throw std::logic_error("PadicValuation: adding infinity");
    return of(v_ + o.v_);
}

std::string PadicValuation::str() const {
    return inf_ ? "inf" : std::to_string(v_);
}

PadicValuation valuation(const BigRat& x, unsigned long long p) {
    if (p < 2 || !is_prime_u64(p))
        throw precondition_error("valuation: not a prime: " + std::to_string(p));
    if (x.is_zero()) return PadicValuation::infinite();
    long long v = 0;
    mpz_class t = x.num();
    while (mpz_divisible_ui_p(t.get_mpz_t(), p)) {
        mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), p);
        ++v;
    }
    if (v == 0) {
        t = x.den();
        while (mpz_divisible_ui_p(t.get_mpz_t(), p)) {
            mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), p);
            --v;
        }
    }
    return PadicValuation::of(v);
}

LogNumber log_plus(const BigRat& x, const Place& v) {
    if (v.is_arch()) {
        if (x.is_zero()) return LogNumber::zero();
        double la = x.log_abs();
        return la > 0.0 ? LogNumber::from_arch(la) : LogNumber::zero();
    }
    PadicValuation val = valuation(x, v.p);
    if (val.is_infinite() || val.value() >= 0) return LogNumber::zero();
    // |x|_p = p^{-v} > 1, so log|x|_p = -v log p with -v > 0
    return LogNumber::from_prime(v.p, BigRat(static_cast<long>(-val.value())));
}

double product_formula_residual(const BigRat& x) {
    if (x.is_zero()) throw precondition_error("product formula: zero input");
    double total = x.log_abs();
    mpz_class n = ::abs(x.num());
    if (n != 1)
        for (const auto& [p, e] : factorize(n))
            total -= static_cast<double>(e) * std::log(static_cast<double>(p));
    if (x.den() != 1)
        for (const auto& [p, e] : factorize(x.den()))
            total += static_cast<double>(e) * std::log(static_cast<double>(p));
    return total;
}

double height(const BigRat& x) {
    if (x.is_zero()) return 0.0;
    mpz_class n = ::abs(x.num());
    const mpz_class& d = x.den();
    return log_mpz(n >= d ? n : d);
}

}  // namespace preperlab
