#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsc/rational.hpp"

namespace qsc::lemmas {

// The recurring bracket c(b,j) = b - 1 + kappa_{j-1} + kappa_{b-j} - kappa_b,
// j = 1..b. Symmetric about (b+1)/2, nonincreasing on the left half, zero sum
// and zero j-weighted sum.
class CoreTermTable {
  public:
    explicit CoreTermTable(int64_t b);
    int64_t b() const { return b_; }
    const Rational& term(int64_t j) const { return values_[size_t(j - 1)]; }  // 1-based
    const std::vector<Rational>& values() const { return values_; }

  private:
    int64_t b_;
    std::vector<Rational> values_;
};

// shared per-b table cache for sweeps
const CoreTermTable& core_terms(int64_t b);

// 2 sum_j c(b,j) / (n + 2 - j - a); nonnegative on the domain a + b <= n
Rational delta2(int64_t n, int64_t a, int64_t b);

// 2 sum_j H_{n+1-j-a} c(b,j); nonpositive
Rational delta1(int64_t n, int64_t a, int64_t b);

// 2 sum_j H_{j+a} c(b,j) = delta1(b + 2a, a, b); nonpositive
Rational lambda1(int64_t a, int64_t b);

// sum_j kappa_{j+a-1} c(b,j) (= sum_j kappa_{a+b-j} c(b,j)); nonnegative
Rational lambda(int64_t a, int64_t b);

// sum_j (kappa_{j+a-1} + kappa_{n-j-a}) c(b,j); nonnegative, -> lambda(a,b)
Rational big_sigma(int64_t n, int64_t a, int64_t b);

// n^{-1} sum_{a<j<=a+b} (n-1 + kappa_{j-1} + kappa_{n-j} - kappa_n) c(b,j-a)
// = big_sigma(n,a,b)/n; the per-pivot covariance kernel
Rational psi(int64_t n, int64_t a, int64_t b);

// sum_{j=1..b} kappa_{m-j} c(b,j); tends to 0 as m grows
Rational kaplim_sum(int64_t m, int64_t b);

struct SignViolation {
    std::string quantity;
    int64_t n, a, b;
    std::string value;  // exact num/den
};

struct ExtremalValue {
    std::string quantity;
    int64_t n = 0, a = 0, b = 0;
    Rational value;
    bool set = false;
};

struct SweepReport {
    int64_t n_max = 0;
    uint64_t checks = 0;
    std::vector<std::pair<std::string, uint64_t>> checks_by_quantity;  // sign checks per name
    std::vector<SignViolation> violations;
    std::vector<ExtremalValue> extremal;  // closest-to-zero nontrivial value per quantity
    bool identities_ok = true;
    std::string first_identity_failure;

    bool passed() const { return violations.empty() && identities_ok; }
    std::string to_json() const;
};

// Exact sign verification over every (n,a,b) with a+b <= n <= n_max:
// delta2 >= 0, delta1 <= 0, big_sigma >= 0, psi >= 0 (n >= 1), and for all
// a,b <= n_max: lambda1 <= 0, lambda >= 0. The difference identities
// delta1(n+1)-delta1(n) = delta2(n), big_sigma(n+1)-big_sigma(n) = delta1(n),
// lambda(a+1)-lambda(a) = lambda1(a) and psi = big_sigma/n are checked on the
// same grid. jobs > 1 shards the grid with a deterministic merge.
SweepReport sweep_signs(int64_t n_max, unsigned jobs = 1);

}  // namespace qsc::lemmas
