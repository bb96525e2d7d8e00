#include "preperlab/bigrat.hpp"

#include <cctype>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace preperlab {

double log_mpz(const mpz_class& z) {
    if (sgn(z) == 0) throw std::invalid_argument("log_mpz: zero");
    signed long exp = 0;
    double m = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return std::log(std::fabs(m)) + static_cast<double>(exp) * M_LN2;
}

BigRat::BigRat(long n, long d) {
    if (d == 0) throw std::invalid_argument("BigRat: zero denominator");
    q_ = mpq_class(n, d);
    q_.canonicalize();
}

BigRat::BigRat(const mpz_class& n, const mpz_class& d) {
    if (sgn(d) == 0) throw std::invalid_argument("BigRat: zero denominator");
    q_ = mpq_class(n) / mpq_class(d);
}

BigRat BigRat::parse(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw std::invalid_argument("BigRat: empty string");
    if (!s.empty() && s[0] == '+') s.erase(0, 1);

    auto is_digits = [](const std::string& t) {
        if (t.empty()) return false;
        for (char ch : t)
            if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
        return true;
    };
    bool neg = false;
    std::string body = s;
    if (!body.empty() && body[0] == '-') {
        neg = true;
        body.erase(0, 1);
    }

    mpq_class q;
    auto slash = body.find('/');
    auto dot = body.find('.');
    if (slash != std::string::npos) {
        std::string n = body.substr(0, slash), d = body.substr(slash + 1);
        if (!is_digits(n) || !is_digits(d)) throw std::invalid_argument("BigRat: bad rational '" + text + "'");
        mpz_class den(d);
        if (sgn(den) == 0) throw std::invalid_argument("BigRat: zero denominator in '" + text + "'");
        q = mpq_class(mpz_class(n)) / mpq_class(den);
    } else if (dot != std::string::npos) {
        std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
        if (ip.empty()) ip = "0";
        if (!is_digits(ip) || !is_digits(fp)) throw std::invalid_argument("BigRat: bad decimal '" + text + "'");
        mpz_class scale = 1;
        for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
        mpz_class whole(ip);
        mpz_class frac = fp.empty() ? mpz_class(0) : mpz_class(fp);
        q = mpq_class(whole * scale + frac) / mpq_class(scale);
    } else {
        if (!is_digits(body)) throw std::invalid_argument("BigRat: bad integer '" + text + "'");
        q = mpq_class(mpz_class(body));
    }
    if (neg) q = -q;
    return BigRat(q);
}

BigRat& BigRat::operator/=(const BigRat& o) {
    if (o.is_zero()) throw std::invalid_argument("BigRat: division by zero");
    q_ /= o.q_;
    return *this;
}

BigRat BigRat::abs() const {
    return sign() < 0 ? -*this : *this;
}

BigRat BigRat::reciprocal() const {
    if (is_zero()) throw std::invalid_argument("BigRat: reciprocal of zero");
    return BigRat(mpq_class(den()) / mpq_class(num()));
}

BigRat BigRat::pow(long e) const {
    if (e == 0) return BigRat(1);
    if (is_zero()) {
        if (e < 0) throw std::invalid_argument("BigRat: negative power of zero");
        return BigRat(0);
    }
    bool inv = e < 0;
    unsigned long k = static_cast<unsigned long>(inv ? -e : e);
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), num().get_mpz_t(), k);
    mpz_pow_ui(d.get_mpz_t(), den().get_mpz_t(), k);
    BigRat r(n, d);
    return inv ? r.reciprocal() : r;
}

double BigRat::log_abs() const {
    if (is_zero()) throw std::invalid_argument("BigRat: log of zero");
    return log_mpz(num()) - log_mpz(den());
}

std::string BigRat::str() const {
    std::string s = num().get_str();
    if (den() != 1) s += "/" + den().get_str();
    return s;
}

std::ostream& operator<<(std::ostream& os, const BigRat& x) {
    return os << x.str();
}

}  // namespace preperlab
