#pragma once

#include <cstdint>
#include <string>

#include "qsc/bigint.hpp"

namespace qsc {

// Exact rational in canonical reduced form: den > 0, gcd(num, den) = 1,
// zero is 0/1. Addition and multiplication use the gcd-of-cofactors scheme
// so intermediate operands stay near the reduced size.
class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(int64_t v) : num_(v), den_(1) {}
    Rational(int64_t num, int64_t den);
    Rational(BigInt num, BigInt den);

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    int sign() const { return num_.sign(); }

    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    Rational operator-() const;

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b);
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    double to_double() const;
    std::string to_string() const;  // always "num/den"

    struct already_reduced_t {};
    Rational(BigInt num, BigInt den, already_reduced_t) : num_(std::move(num)), den_(std::move(den)) {}

  private:
    BigInt num_;
    BigInt den_;
    void reduce();
};

// Running sum of rationals over an unreduced common denominator. Adding a
// term whose denominator divides (or is divided by) the accumulated one
// costs a single division; the result is reduced once in value().
class RationalSum {
  public:
    void add(const Rational& x);
    Rational value() const;

  private:
    BigInt num_{0};
    BigInt den_{1};
};

std::ostream& operator<<(std::ostream& os, const Rational& v);

}  // namespace qsc
