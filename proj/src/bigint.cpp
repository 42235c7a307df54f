#include "qsc/bigint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace qsc {

namespace {
constexpr uint64_t kBase = uint64_t(1) << 32;
}

BigInt::BigInt(int64_t v) {
    if (v < 0) {
        neg_ = true;
        // avoid overflow on INT64_MIN
        set_u64(uint64_t(0) - uint64_t(v));
    } else {
        set_u64(uint64_t(v));
    }
}

BigInt BigInt::from_uint64(uint64_t v) {
    BigInt r;
    r.set_u64(v);
    return r;
}

BigInt BigInt::from_decimal(const std::string& s) {
    BigInt r;
    size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
        neg = (s[i] == '-');
        ++i;
    }
    if (i >= s.size()) throw std::invalid_argument("BigInt: empty decimal string");
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("BigInt: bad digit");
        // r = r*10 + digit
        uint64_t carry = uint64_t(s[i] - '0');
        for (auto& limb : r.limbs_) {
            uint64_t cur = uint64_t(limb) * 10 + carry;
            limb = uint32_t(cur);
            carry = cur >> 32;
        }
        if (carry) r.limbs_.push_back(uint32_t(carry));
    }
    r.neg_ = neg && !r.limbs_.empty();
    return r;
}

void BigInt::set_u64(uint64_t v) {
    limbs_.clear();
    if (v) limbs_.push_back(uint32_t(v));
    if (v >> 32) limbs_.push_back(uint32_t(v >> 32));
}

void BigInt::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) neg_ = false;
}

BigInt& BigInt::negate() {
    if (!limbs_.empty()) neg_ = !neg_;
    return *this;
}

BigInt BigInt::abs() const {
    BigInt r = *this;
    r.neg_ = false;
    return r;
}

BigInt BigInt::operator-() const {
    BigInt r = *this;
    r.negate();
    return r;
}

int BigInt::cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

void BigInt::add_mag(std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (b.size() > a.size()) a.resize(b.size(), 0);
    uint64_t carry = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        uint64_t cur = uint64_t(a[i]) + (i < b.size() ? b[i] : 0) + carry;
        a[i] = uint32_t(cur);
        carry = cur >> 32;
        if (carry == 0 && i >= b.size()) return;
    }
    if (carry) a.push_back(uint32_t(carry));
}

void BigInt::sub_mag(std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    int64_t borrow = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        int64_t cur = int64_t(a[i]) - (i < b.size() ? int64_t(b[i]) : 0) - borrow;
        if (cur < 0) {
            cur += int64_t(kBase);
            borrow = 1;
        } else {
            borrow = 0;
        }
        a[i] = uint32_t(cur);
        if (borrow == 0 && i >= b.size()) break;
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
}

std::vector<uint32_t> BigInt::mul_mag(const std::vector<uint32_t>& a,
                                      const std::vector<uint32_t>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<uint32_t> r(a.size() + b.size(), 0);
    for (size_t i = 0; i < a.size(); ++i) {
        uint64_t carry = 0;
        uint64_t ai = a[i];
        for (size_t j = 0; j < b.size(); ++j) {
            uint64_t cur = ai * b[j] + r[i + j] + carry;
            r[i + j] = uint32_t(cur);
            carry = cur >> 32;
        }
        size_t k = i + b.size();
        while (carry) {
            uint64_t cur = r[k] + carry;
            r[k] = uint32_t(cur);
            carry = cur >> 32;
            ++k;
        }
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

// Knuth algorithm D (Hacker's Delight divmnu, 32-bit digits).
void BigInt::divmod_mag(const std::vector<uint32_t>& u, const std::vector<uint32_t>& v,
                        std::vector<uint32_t>& q, std::vector<uint32_t>& r) {
    const size_t m = u.size(), n = v.size();
    q.clear();
    r.clear();
    if (n == 0) throw std::domain_error("BigInt: division by zero");
    if (cmp_mag(u, v) < 0) {
        r = u;
        return;
    }
    if (n == 1) {
        const uint64_t d = v[0];
        q.resize(m);
        uint64_t rem = 0;
        for (size_t i = m; i-- > 0;) {
            uint64_t cur = (rem << 32) | u[i];
            q[i] = uint32_t(cur / d);
            rem = cur % d;
        }
        while (!q.empty() && q.back() == 0) q.pop_back();
        if (rem) {
            r.push_back(uint32_t(rem));
            if (rem >> 32) r.push_back(uint32_t(rem >> 32));
        }
        return;
    }

    const int s = std::countl_zero(v[n - 1]);
    std::vector<uint32_t> vn(n), un(m + 1);
    for (size_t i = n - 1; i > 0; --i)
        vn[i] = uint32_t((v[i] << s) | (uint64_t(v[i - 1]) >> (32 - s)));
    vn[0] = v[0] << s;
    un[m] = uint32_t(uint64_t(u[m - 1]) >> (32 - s));
    for (size_t i = m - 1; i > 0; --i)
        un[i] = uint32_t((u[i] << s) | (uint64_t(u[i - 1]) >> (32 - s)));
    un[0] = u[0] << s;

    q.assign(m - n + 1, 0);
    for (size_t j = m - n + 1; j-- > 0;) {
        uint64_t num = (uint64_t(un[j + n]) << 32) | un[j + n - 1];
        uint64_t qhat = num / vn[n - 1];
        uint64_t rhat = num % vn[n - 1];
        while (qhat >= kBase || qhat * vn[n - 2] > ((rhat << 32) | un[j + n - 2])) {
            --qhat;
            rhat += vn[n - 1];
            if (rhat >= kBase) break;
        }
        // multiply and subtract
        int64_t borrow = 0;
        uint64_t carry = 0;
        for (size_t i = 0; i < n; ++i) {
            uint64_t p = qhat * vn[i] + carry;
            carry = p >> 32;
            int64_t t = int64_t(un[i + j]) - borrow - int64_t(uint32_t(p));
            un[i + j] = uint32_t(t);
            borrow = (t < 0) ? 1 : 0;
        }
        int64_t t = int64_t(un[j + n]) - borrow - int64_t(carry);
        un[j + n] = uint32_t(t);
        q[j] = uint32_t(qhat);
        if (t < 0) {
            // qhat was one too large; add back
            --q[j];
            uint64_t c2 = 0;
            for (size_t i = 0; i < n; ++i) {
                uint64_t cur = uint64_t(un[i + j]) + vn[i] + c2;
                un[i + j] = uint32_t(cur);
                c2 = cur >> 32;
            }
            un[j + n] = uint32_t(un[j + n] + c2);
        }
    }
    while (!q.empty() && q.back() == 0) q.pop_back();
    r.resize(n);
    for (size_t i = 0; i < n - 1; ++i)
        r[i] = uint32_t((un[i] >> s) | (uint64_t(un[i + 1]) << (32 - s)));
    r[n - 1] = un[n - 1] >> s;
    while (!r.empty() && r.back() == 0) r.pop_back();
}

BigInt& BigInt::operator+=(const BigInt& o) {
    if (&o == this) {
        const BigInt tmp = o;
        return *this += tmp;
    }
    if (neg_ == o.neg_) {
        add_mag(limbs_, o.limbs_);
    } else if (cmp_mag(limbs_, o.limbs_) >= 0) {
        sub_mag(limbs_, o.limbs_);
    } else {
        std::vector<uint32_t> tmp = o.limbs_;
        sub_mag(tmp, limbs_);
        limbs_ = std::move(tmp);
        neg_ = o.neg_;
    }
    trim();
    return *this;
}

BigInt& BigInt::operator-=(const BigInt& o) {
    negate();
    *this += o;
    negate();
    trim();
    return *this;
}

BigInt operator*(const BigInt& a, const BigInt& b) {
    BigInt r;
    r.limbs_ = BigInt::mul_mag(a.limbs_, b.limbs_);
    r.neg_ = (a.neg_ != b.neg_) && !r.limbs_.empty();
    return r;
}

BigInt& BigInt::operator*=(const BigInt& o) {
    *this = *this * o;
    return *this;
}

std::pair<BigInt, BigInt> BigInt::divmod(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod_mag(a.limbs_, b.limbs_, q.limbs_, r.limbs_);
    q.neg_ = (a.neg_ != b.neg_) && !q.limbs_.empty();
    r.neg_ = a.neg_ && !r.limbs_.empty();
    return {std::move(q), std::move(r)};
}

BigInt operator/(const BigInt& a, const BigInt& b) { return BigInt::divmod(a, b).first; }
BigInt operator%(const BigInt& a, const BigInt& b) { return BigInt::divmod(a, b).second; }

BigInt& BigInt::operator/=(const BigInt& o) {
    *this = *this / o;
    return *this;
}

BigInt& BigInt::operator%=(const BigInt& o) {
    *this = *this % o;
    return *this;
}

BigInt BigInt::gcd(const BigInt& a, const BigInt& b) {
    std::vector<uint32_t> x = a.limbs_, y = b.limbs_;
    while (!y.empty()) {
        if (x.size() <= 2 && y.size() <= 2) {
            // fits in hardware words
            uint64_t ux = x.empty() ? 0 : x[0] | (x.size() > 1 ? uint64_t(x[1]) << 32 : 0);
            uint64_t uy = y[0] | (y.size() > 1 ? uint64_t(y[1]) << 32 : 0);
            BigInt g;
            g.set_u64(std::gcd(ux, uy));
            return g;
        }
        std::vector<uint32_t> q, r;
        divmod_mag(x, y, q, r);
        x = std::move(y);
        y = std::move(r);
    }
    BigInt g;
    g.limbs_ = std::move(x);
    return g;
}

bool operator==(const BigInt& a, const BigInt& b) {
    return a.neg_ == b.neg_ && a.limbs_ == b.limbs_;
}

bool operator<(const BigInt& a, const BigInt& b) {
    if (a.neg_ != b.neg_) return a.neg_;
    int c = BigInt::cmp_mag(a.limbs_, b.limbs_);
    return a.neg_ ? c > 0 : c < 0;
}

bool BigInt::fits_int64() const {
    if (limbs_.size() > 2) return false;
    if (limbs_.size() < 2) return true;
    uint64_t mag = uint64_t(limbs_[1]) << 32 | limbs_[0];
    return neg_ ? mag <= uint64_t(1) << 63 : mag < uint64_t(1) << 63;
}

int64_t BigInt::to_int64() const {
    uint64_t mag = 0;
    if (!limbs_.empty()) mag = limbs_[0];
    if (limbs_.size() > 1) mag |= uint64_t(limbs_[1]) << 32;
    return neg_ ? -int64_t(mag) : int64_t(mag);
}

size_t BigInt::bit_length() const {
    if (limbs_.empty()) return 0;
    return 32 * limbs_.size() - size_t(std::countl_zero(limbs_.back()));
}

double BigInt::mantissa_exp(int64_t& exp2) const {
    if (limbs_.empty()) {
        exp2 = 0;
        return 0.0;
    }
    const size_t bits = bit_length();
    uint64_t top;
    if (bits <= 64) {
        top = limbs_[0];
        if (limbs_.size() > 1) top |= uint64_t(limbs_[1]) << 32;
        top <<= 64 - bits;
    } else {
        const size_t shift = bits - 64;
        const size_t word = shift / 32, off = shift % 32;
        auto limb = [&](size_t i) -> uint64_t { return i < limbs_.size() ? limbs_[i] : 0; };
        // 64 bits of magnitude starting at bit 'shift'
        top = (limb(word) | (limb(word + 1) << 32)) >> off;
        if (off) top |= limb(word + 2) << (64 - off);
    }
    exp2 = int64_t(bits);
    const double m = std::ldexp(double(top), -64);
    return neg_ ? -m : m;
}

double BigInt::to_double() const {
    int64_t e;
    const double m = mantissa_exp(e);
    if (e > 2000) return neg_ ? -HUGE_VAL : HUGE_VAL;
    return std::ldexp(m, int(e));
}

std::string BigInt::to_string() const {
    if (limbs_.empty()) return "0";
    std::vector<uint32_t> tmp = limbs_;
    std::string digits;
    while (!tmp.empty()) {
        uint64_t rem = 0;
        for (size_t i = tmp.size(); i-- > 0;) {
            uint64_t cur = (rem << 32) | tmp[i];
            tmp[i] = uint32_t(cur / 1000000000u);
            rem = cur % 1000000000u;
        }
        while (!tmp.empty() && tmp.back() == 0) tmp.pop_back();
        for (int k = 0; k < 9; ++k) {
            digits.push_back(char('0' + rem % 10));
            rem /= 10;
        }
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    if (neg_) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
}

std::ostream& operator<<(std::ostream& os, const BigInt& v) { return os << v.to_string(); }

}  // namespace qsc
