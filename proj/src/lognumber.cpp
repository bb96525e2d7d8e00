#include "preperlab/lognumber.hpp"

#include <cmath>
#include <sstream>

namespace preperlab {

LogNumber LogNumber::from_prime(unsigned long long p, const BigRat& exponent) {
    LogNumber x;
    if (!exponent.is_zero()) x.finite_[p] = exponent;
    return x;
}

LogNumber LogNumber::from_arch(double a) {
    LogNumber x;
    x.arch_ = a;
    return x;
}

BigRat LogNumber::finite_exponent(unsigned long long p) const {
    auto it = finite_.find(p);
    return it == finite_.end() ? BigRat(0) : it->second;
}

double LogNumber::real() const {
    double r = arch_;
    for (const auto& [p, q] : finite_) r += q.to_double() * std::log(static_cast<double>(p));
    return r;
}

LogNumber& LogNumber::operator+=(const LogNumber& o) {
    for (const auto& [p, q] : o.finite_) finite_[p] += q;
    arch_ += o.arch_;
    strip_zeros();
    return *this;
}

LogNumber& LogNumber::operator-=(const LogNumber& o) {
    for (const auto& [p, q] : o.finite_) finite_[p] -= q;
    arch_ -= o.arch_;
    strip_zeros();
    return *this;
}

LogNumber LogNumber::operator-() const {
    LogNumber x;
    for (const auto& [p, q] : finite_) x.finite_[p] = -q;
    x.arch_ = -arch_;
    return x;
}

LogNumber LogNumber::scaled(const BigRat& s) const {
    LogNumber x;
    if (!s.is_zero())
        for (const auto& [p, q] : finite_) x.finite_[p] = q * s;
    x.arch_ = arch_ * s.to_double();
    return x;
}

std::string LogNumber::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [p, q] : finite_) {
        if (!first) os << " + ";
        os << q.str() << "*log(" << p << ")";
        first = false;
    }
    if (arch_ != 0.0 || first) {
        if (!first) os << " + ";
        os << arch_;
    }
    return os.str();
}

void LogNumber::strip_zeros() {
    for (auto it = finite_.begin(); it != finite_.end();) {
        if (it->second.is_zero())
            it = finite_.erase(it);
        else
            ++it;
    }
}

}  // namespace preperlab
