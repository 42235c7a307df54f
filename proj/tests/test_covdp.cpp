#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qsc/covdp.hpp"
#include "qsc/exact.hpp"
#include "qsc/sorter.hpp"

using namespace qsc;
using namespace qsc::covdp;

TEST_SUITE_BEGIN("covdp");

TEST_CASE("base cases and frozen values") {
    CHECK(cov_conditional_exact(0, 0, 0) == Rational(0));
    CHECK(cov_conditional_exact(1, 0, 1) == Rational(0));
    CHECK(cov_conditional_exact(2, 0, 2) == Rational(0));
    CHECK(cov_conditional_exact(3, 0, 3) == Rational(2, 9));
    CHECK(cov_conditional_exact(5, 2, 0) == Rational(0));
    CHECK_THROWS(cov_conditional_exact(3, 2, 2));
}

TEST_CASE("boundary identity: full group recovers Var K_n") {
    for (int64_t n = 0; n <= 20; ++n)
        CHECK(cov_conditional_exact(n, 0, n) == exact::var_k(size_t(n)));
    // interior state frozen from an independent bignum evaluation
    CHECK(cov_conditional_exact(12, 3, 5) == Rational(44621, 37800));
}

TEST_CASE("exact table is nonnegative through n = 30") {
    const auto table = CovTable::exact_table(30);
    CHECK(table.min_value_exact().sign() >= 0);
}

TEST_CASE("brute force agrees with the recursion") {
    CHECK(cov_brute(3, 0, 3) == Rational(2, 9));
    CHECK(cov_brute(4, 2, 0) == Rational(0));
    CHECK(cov_brute(4, 1, 2) == cov_conditional_exact(4, 1, 2));
    for (int64_t n = 0; n <= 6; ++n)
        for (int64_t a = 0; a <= n; ++a)
            for (int64_t b = 0; a + b <= n; ++b)
                CHECK(cov_brute(n, a, b) == cov_conditional_exact(n, a, b));
    CHECK_THROWS(cov_brute(12, 0, 12));
}

TEST_CASE("float table tracks the exact table") {
    const auto fexact = CovTable::exact_table(25);
    const auto ffloat = CovTable::float_table(25);
    for (int64_t n = 0; n <= 25; ++n)
        for (int64_t a = 0; a <= n; ++a)
            for (int64_t b = 0; a + b <= n; ++b)
                CHECK(ffloat.value(n, a, b) ==
                      doctest::Approx(fexact.value(n, a, b)).epsilon(1e-9));
    CHECK(ffloat.min_value() >= -1e-9);
}

TEST_CASE("float table stays nonnegative to n = 120") {
    const auto table = CovTable::float_table(120);
    CHECK(table.min_value() >= -1e-9);
}

// The unconditional covariance equals the multinomial mixture of the
// conditional table: enumerate n! arrival orders crossed with every
// below/in/above assignment, exactly.
TEST_CASE("unconditional reduction identity") {
    const Rational p_minus(1, 6), p_w(1, 3), p_rest(1, 2);
    for (uint32_t n = 2; n <= 5; ++n) {
        Rational lhs_ks, lhs_s;  // E[K S_w], E[S_w]
        std::vector<uint32_t> cat(n, 0);
        while (true) {
            // weight of this assignment
            Rational weight(1);
            uint32_t a = 0, b = 0;
            for (uint32_t i = 0; i < n; ++i) {
                if (cat[i] == 0) {
                    weight *= p_minus;
                    ++a;
                } else if (cat[i] == 1) {
                    weight *= p_w;
                    ++b;
                } else {
                    weight *= p_rest;
                }
            }
            std::vector<uint32_t> perm(n);
            std::iota(perm.begin(), perm.end(), 1);
            int64_t cnt = 0, sum_ks = 0, sum_s = 0;
            do {
                const auto g = quicksort_ranks_grouped(perm, a, b);
                sum_ks += int64_t(g.key_comparisons * g.group_comparisons);
                sum_s += int64_t(g.group_comparisons);
                ++cnt;
            } while (std::next_permutation(perm.begin(), perm.end()));
            lhs_ks += weight * Rational(sum_ks, cnt);
            lhs_s += weight * Rational(sum_s, cnt);
            size_t i = 0;
            while (i < n && cat[i] == 2) cat[i++] = 0;
            if (i == n) break;
            cat[i]++;
        }
        const Rational lhs = lhs_ks - exact::kappa(n) * lhs_s;

        // rhs: multinomial over (a, b) times the conditional covariance
        Rational rhs;
        for (uint32_t a = 0; a <= n; ++a) {
            for (uint32_t b = 0; a + b <= n; ++b) {
                // multinomial coefficient n! / (a! b! (n-a-b)!)
                auto fact = [](uint32_t k) {
                    int64_t f = 1;
                    for (uint32_t i = 2; i <= k; ++i) f *= i;
                    return f;
                };
                const Rational coef(fact(n) / (fact(a) * fact(b) * fact(n - a - b)));
                Rational cell = coef;
                for (uint32_t i = 0; i < a; ++i) cell *= p_minus;
                for (uint32_t i = 0; i < b; ++i) cell *= p_w;
                for (uint32_t i = 0; i < n - a - b; ++i) cell *= p_rest;
                rhs += cell * cov_conditional_exact(n, a, b);
            }
        }
        CHECK(lhs == rhs);
    }
}

TEST_CASE("poissonized covariance edge cases and frozen value") {
    CHECK(cov_k_sw_exact(0.0, 0.0, 10.0).value == 0.0);
    CHECK(cov_k_sw_exact(0.5, 0.0, 0.0).value == 0.0);
    const auto res = cov_k_sw_exact(0.5, 0.0, 8.0, 1e-9);
    CHECK(res.truncation_ok);
    CHECK(res.t_w == doctest::Approx(35.2481).epsilon(2e-4));
    CHECK(res.v_w == doctest::Approx(1.4365).epsilon(5e-3));
    CHECK(res.value == doctest::Approx(36.6846).epsilon(2e-4));
    // mirror prefix at the same length has the same law for the fair source
    const auto res1 = cov_k_sw_exact(0.5, 0.5, 8.0, 1e-9);
    CHECK(res1.value == doctest::Approx(res.value).epsilon(1e-6));
    const auto res01 = cov_k_sw_exact(0.25, 0.25, 8.0, 1e-9);
    CHECK(res01.value == doctest::Approx(11.1382).epsilon(1e-3));
    CHECK_THROWS(cov_k_sw_exact(0.7, 0.7, 5.0));
}

TEST_CASE("csv export") {
    const auto table = CovTable::exact_table(4);
    const auto csv = table.to_csv();
    CHECK(csv.rfind("n,a,b,numerator,denominator\n", 0) == 0);
    CHECK(csv.find("\n3,0,3,2,9\n") != std::string::npos);
    const auto fcsv = CovTable::float_table(4).to_csv();
    CHECK(fcsv.rfind("n,a,b,value\n", 0) == 0);
}

TEST_SUITE_END();
