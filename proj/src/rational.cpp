#include "qsc/rational.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace qsc {

Rational::Rational(int64_t num, int64_t den) : num_(num), den_(den) { reduce(); }

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    reduce();
}

void Rational::reduce() {
    if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
    if (den_.is_negative()) {
        den_.negate();
        num_.negate();
    }
    if (num_.is_zero()) {
        den_ = BigInt(1);
        return;
    }
    BigInt g = BigInt::gcd(num_, den_);
    if (!(g == BigInt(1))) {
        num_ /= g;
        den_ /= g;
    }
}

Rational Rational::operator-() const {
    Rational r = *this;
    r.num_.negate();
    return r;
}

Rational& Rational::operator+=(const Rational& o) {
    if (o.num_.is_zero()) return *this;
    if (num_.is_zero()) {
        *this = o;
        return *this;
    }
    // Knuth 4.5.1: reduce via g = gcd(b, d); only gcd(t, g) can divide out.
    const BigInt g = BigInt::gcd(den_, o.den_);
    if (g == BigInt(1)) {
        num_ = num_ * o.den_ + o.num_ * den_;
        den_ = den_ * o.den_;
    } else {
        const BigInt d1 = o.den_ / g;
        BigInt t = num_ * d1 + o.num_ * (den_ / g);
        const BigInt h = BigInt::gcd(t, g);
        num_ = (h == BigInt(1)) ? std::move(t) : t / h;
        den_ = (den_ / h) * d1;
    }
    if (num_.is_zero()) den_ = BigInt(1);
    return *this;
}

Rational& Rational::operator-=(const Rational& o) {
    if (&o == this) {
        *this = Rational();
        return *this;
    }
    num_.negate();
    *this += o;
    num_.negate();
    return *this;
}

Rational& Rational::operator*=(const Rational& o) {
    if (num_.is_zero() || o.num_.is_zero()) {
        *this = Rational();
        return *this;
    }
    const BigInt g1 = BigInt::gcd(num_, o.den_);
    const BigInt g2 = BigInt::gcd(o.num_, den_);
    num_ = (num_ / g1) * (o.num_ / g2);
    den_ = (den_ / g2) * (o.den_ / g1);
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_.is_zero()) throw std::domain_error("Rational: division by zero");
    Rational inv(o.den_, o.num_, already_reduced_t{});
    if (inv.den_.is_negative()) {
        inv.den_.negate();
        inv.num_.negate();
    }
    return *this *= inv;
}

bool operator<(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
}

double Rational::to_double() const {
    if (num_.is_zero()) return 0.0;
    if (num_.bit_length() <= 62 && den_.bit_length() <= 62) {
        return double(num_.to_int64()) / double(den_.to_int64());
    }
    int64_t en, ed;
    const double mn = num_.mantissa_exp(en);
    const double md = den_.mantissa_exp(ed);
    return std::ldexp(mn / md, int(en - ed));
}

std::string Rational::to_string() const { return num_.to_string() + "/" + den_.to_string(); }

std::ostream& operator<<(std::ostream& os, const Rational& v) { return os << v.to_string(); }

void RationalSum::add(const Rational& x) {
    if (x.is_zero()) return;
    if (num_.is_zero()) {
        num_ = x.num();
        den_ = x.den();
        return;
    }
    if (den_ == x.den()) {
        num_ += x.num();
        return;
    }
    auto [q1, r1] = BigInt::divmod(den_, x.den());
    if (r1.is_zero()) {  // x.den | den
        num_ += x.num() * q1;
        return;
    }
    auto [q2, r2] = BigInt::divmod(x.den(), den_);
    if (r2.is_zero()) {  // den | x.den
        num_ = num_ * q2 + x.num();
        den_ = x.den();
        return;
    }
    // gcd(den, x.den) continues the Euclid chain already started above
    BigInt g = BigInt::gcd(x.den(), r1);
    const BigInt scale = x.den() / g;
    num_ = num_ * scale + x.num() * (den_ / g);
    den_ = den_ * scale;
}

Rational RationalSum::value() const {
    if (num_.is_zero()) return Rational();
    return Rational(num_, den_);
}

}  // namespace qsc
