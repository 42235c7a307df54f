#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qsc {

// Arbitrary-precision signed integer on 32-bit limbs (little-endian
// magnitude plus sign). Division truncates toward zero, so the remainder
// carries the sign of the dividend. gcd() is Euclidean with multi-word
// division: on operands sharing a large common factor the quotient chain
// collapses to the cofactors' chain, which is the dominant pattern in the
// harmonic-number workloads here.
class BigInt {
  public:
    BigInt() = default;
    BigInt(int64_t v);

    static BigInt from_uint64(uint64_t v);
    static BigInt from_decimal(const std::string& s);

    bool is_zero() const { return limbs_.empty(); }
    bool is_negative() const { return neg_; }
    int sign() const { return is_zero() ? 0 : (neg_ ? -1 : 1); }

    BigInt& negate();
    BigInt abs() const;

    BigInt& operator+=(const BigInt& o);
    BigInt& operator-=(const BigInt& o);
    BigInt& operator*=(const BigInt& o);
    BigInt& operator/=(const BigInt& o);
    BigInt& operator%=(const BigInt& o);

    friend BigInt operator+(BigInt a, const BigInt& b) { return a += b; }
    friend BigInt operator-(BigInt a, const BigInt& b) { return a -= b; }
    friend BigInt operator*(const BigInt& a, const BigInt& b);
    friend BigInt operator/(const BigInt& a, const BigInt& b);
    friend BigInt operator%(const BigInt& a, const BigInt& b);
    BigInt operator-() const;

    // quotient truncated toward zero, remainder with dividend's sign
    static std::pair<BigInt, BigInt> divmod(const BigInt& a, const BigInt& b);
    static BigInt gcd(const BigInt& a, const BigInt& b);

    friend bool operator==(const BigInt& a, const BigInt& b);
    friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
    friend bool operator<(const BigInt& a, const BigInt& b);
    friend bool operator>(const BigInt& a, const BigInt& b) { return b < a; }
    friend bool operator<=(const BigInt& a, const BigInt& b) { return !(b < a); }
    friend bool operator>=(const BigInt& a, const BigInt& b) { return !(a < b); }

    bool fits_int64() const;
    int64_t to_int64() const;  // requires fits_int64()
    double to_double() const;  // overflows to +-inf beyond double range
    // magnitude = mantissa * 2^exp2 with mantissa in [0.5, 1); sign applied
    double mantissa_exp(int64_t& exp2) const;
    size_t bit_length() const;

    std::string to_string() const;  // decimal

    size_t limb_count() const { return limbs_.size(); }

  private:
    std::vector<uint32_t> limbs_;  // empty == zero
    bool neg_ = false;

    void trim();
    void set_u64(uint64_t v);

    static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static void add_mag(std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static void sub_mag(std::vector<uint32_t>& a, const std::vector<uint32_t>& b);  // a >= b
    static std::vector<uint32_t> mul_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b);
    static void divmod_mag(const std::vector<uint32_t>& u, const std::vector<uint32_t>& v,
                           std::vector<uint32_t>& q, std::vector<uint32_t>& r);
};

std::ostream& operator<<(std::ostream& os, const BigInt& v);

}  // namespace qsc
