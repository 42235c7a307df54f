#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qsc/exact.hpp"
#include "qsc/harmonic.hpp"
#include "qsc/sorter.hpp"

using namespace qsc;
using namespace qsc::exact;

TEST_SUITE_BEGIN("exact");

TEST_CASE("harmonic cache values") {
    CHECK(harmonics().h1(0) == Rational(0));
    CHECK(harmonics().h1(1) == Rational(1));
    CHECK(harmonics().h1(5) == Rational(137, 60));
    CHECK(harmonics().h2(3) == Rational(49, 36));
    // recurrences hold along the cache
    for (size_t n = 1; n <= 300; ++n) {
        CHECK(harmonics().h1(n) - harmonics().h1(n - 1) == Rational(1, int64_t(n)));
        CHECK(harmonics().h2(n) - harmonics().h2(n - 1) ==
              Rational(1, int64_t(n) * int64_t(n)));
    }
}

TEST_CASE("kappa closed form") {
    CHECK(kappa(0) == Rational(0));
    CHECK(kappa(1) == Rational(0));
    CHECK(kappa(2) == Rational(1));
    CHECK(kappa(3) == Rational(8, 3));
    CHECK(kappa(4) == Rational(29, 6));
    CHECK(kappa(5) == Rational(37, 5));
    // matches 2(n+1)H_n - 4n directly
    for (size_t n = 0; n <= 200; ++n) {
        const Rational direct =
            Rational(2 * int64_t(n + 1)) * harmonics().h1(n) - Rational(4 * int64_t(n));
        CHECK(kappa(n) == direct);
    }
    // telescoping: kappa_n - kappa_{n-1} = 2 H_n - 2; the constant drops
    // whenever the differences are summed against zero-sum weights
    for (size_t n = 1; n <= 500; ++n)
        CHECK(kappa(n) - kappa(n - 1) == Rational(2) * harmonics().h1(n) - Rational(2));
}

TEST_CASE("kappa recurrence identity") {
    CHECK(kappa_via_recurrence(1, 0) == Rational(0));
    CHECK(kappa_via_recurrence(3, 0) == Rational(8, 3));
    CHECK(kappa_via_recurrence(3, 5) == Rational(8, 3));
    for (int64_t e : {0, 3, 17}) {
        for (int64_t d = 1; d <= 300; ++d) CHECK(kappa_via_recurrence(d, e) == kappa(size_t(d)));
    }
    CHECK_THROWS(kappa_via_recurrence(0, 0));
}

TEST_CASE("var_k exact values") {
    CHECK(var_k(0) == Rational(0));
    CHECK(var_k(1) == Rational(0));
    CHECK(var_k(2) == Rational(0));
    CHECK(var_k(3) == Rational(2, 9));
    CHECK(var_k(4) == Rational(29, 36));
    CHECK(var_k(5) == Rational(46, 25));
}

TEST_CASE("var_k is nonnegative along the whole range") {
    // exact sign of 7n^2 + 13n - 4(n+1)^2 H2 - 2(n+1) H1 without reducing:
    // cross-multiply onto the common denominator d1*d2
    harmonics().reserve(10000);
    size_t bad = 0;
    for (size_t n = 0; n <= 10000; ++n) {
        const int64_t ni = int64_t(n);
        const Rational& h1 = harmonics().h1(n);
        const Rational& h2 = harmonics().h2(n);
        BigInt lhs = BigInt(7 * ni * ni + 13 * ni) * (h1.den() * h2.den());
        lhs -= BigInt(4 * (ni + 1) * (ni + 1)) * (h2.num() * h1.den());
        lhs -= BigInt(2 * (ni + 1)) * (h1.num() * h2.den());
        if (lhs.sign() < 0) ++bad;
        // the unreduced form matches the canonical rational on a subsample
        if (n % 997 == 0) CHECK((lhs.sign() >= 0) == (var_k(n).sign() >= 0));
    }
    CHECK(bad == 0);
}

TEST_CASE("brute-force moments over all arrival orders match kappa and var_k") {
    for (uint32_t n = 0; n <= 6; ++n) {
        std::vector<uint32_t> perm(n);
        std::iota(perm.begin(), perm.end(), 1);
        int64_t count = 0, sum = 0, sum_sq = 0;
        do {
            const int64_t k = int64_t(quicksort_ranks(perm));
            sum += k;
            sum_sq += k * k;
            ++count;
        } while (std::next_permutation(perm.begin(), perm.end()));
        const Rational mean(sum, count);
        const Rational var = Rational(sum_sq, count) - mean * mean;
        CHECK(mean == kappa(n));
        CHECK(var == var_k(n));
    }
}

TEST_CASE("sigma_sq and the variance limit") {
    CHECK(sigma_sq() == 7.0 - 2.0 * M_PI * M_PI / 3.0);
    CHECK(sigma_sq() > 0);
    // var_k(n)/n^2 approaches sigma^2 from below at rate ~ 2 ln n / n
    double prev_gap = 1.0;
    for (size_t n : {100, 1000, 10000}) {
        const double gap = std::abs(var_k(n).to_double() / double(n) / double(n) - sigma_sq());
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("kappa_asymptotic error bound") {
    CHECK(std::abs(kappa(100).to_double() - kappa_asymptotic(100)) <= 2.0 / 100.0);
    CHECK(std::isfinite(kappa_asymptotic(1)));
    double prev = 1e9;
    for (size_t n : {10, 100, 1000}) {
        const double diff = std::abs(kappa(n).to_double() - kappa_asymptotic(n));
        CHECK(diff < prev);
        prev = diff;
    }
}

TEST_CASE("poisson_mix basics") {
    CHECK(poisson_mix([](int64_t) { return 1.0; }, 7.0, 1e-10) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(poisson_mix([](int64_t n) { return double(n); }, 5.0, 1e-10) ==
          doctest::Approx(5.0).epsilon(1e-10));
    CHECK(poisson_mix([](int64_t n) { return double(n); }, 0.0, 1e-10) == 0.0);
    CHECK(poisson_mix([](int64_t n) { return var_k_dbl(size_t(n)); }, 10.0, 1e-10) > 0.0);
    // second moment of Poisson(t) is t^2 + t
    CHECK(poisson_mix([](int64_t n) { return double(n) * double(n); }, 30.0, 1e-10) ==
          doctest::Approx(930.0).epsilon(1e-9));
}

TEST_CASE("poissonized mean and variance of K") {
    CHECK(mean_k_poisson(0.0) == 0.0);
    CHECK(var_k_poisson(0.0) == 0.0);
    const double t = 25.0;
    const double within = poisson_mix([](int64_t n) { return var_k_dbl(size_t(n)); }, t, 1e-10);
    CHECK(var_k_poisson(t) >= within);
    // finite-t check of the sigma^2 lower bound
    CHECK(var_k_poisson(1000.0) / (1000.0 * 1000.0) >= sigma_sq());
}

TEST_CASE("binomial kappa mix") {
    CHECK(binom_mix_kappa(5, 1.0) == doctest::Approx(kappa_dbl(5)));
    CHECK(binom_mix_kappa(5, 0.0) == 0.0);
    CHECK(binom_mix_kappa(2, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
    for (double p = 0.1; p < 0.95; p += 0.1) {
        double prev = -1.0;
        for (int64_t n = 0; n <= 200; ++n) {
            const double g = binom_mix_kappa(n, p);
            CHECK(g >= prev - 1e-9);
            prev = g;
        }
    }
}

TEST_CASE("t_w_exact sign and edge cases") {
    CHECK(t_w_exact(0.0, 10.0) == 0.0);
    CHECK(t_w_exact(0.5, 0.0) == 0.0);
    const double v = t_w_exact(0.5, 10.0);
    CHECK(v >= 0.0);
    CHECK(v == doctest::Approx(55.6367).epsilon(1e-3));  // frozen series evaluation
    for (double p : {0.1, 0.3, 0.7, 0.9})
        for (double t : {2.0, 8.0, 30.0}) CHECK(t_w_exact(p, t) >= 0.0);
}

TEST_CASE("mean_s_poisson") {
    auto src = parse_source_spec("memoryless:1/2,1/2");
    CHECK(mean_s_poisson(src, 0.0) == 0.0);
    const double t = 20.0;
    const double total = mean_s_poisson(src, t, 1e-7);
    CHECK(total >= mean_k_poisson(t));
    // levels account for the total within the pruning tolerance
    const auto levels = mean_s_levels(src, t, 40);
    double level_sum = 0;
    for (double v : levels) level_sum += v;
    CHECK(total == doctest::Approx(level_sum).epsilon(1e-6));
    // level 0 is E K(t), level 1 is 2 E K(t/2) for the fair binary source
    CHECK(levels[0] == doctest::Approx(mean_k_poisson(t)).epsilon(1e-10));
    CHECK(levels[1] == doctest::Approx(2 * mean_k_poisson(t / 2)).epsilon(1e-10));

    auto mk = SourceModel::markov_exact(
        Alphabet::indexed(2), {Rational(1, 2), Rational(1, 2)},
        {{Rational(7, 10), Rational(3, 10)}, {Rational(2, 5), Rational(3, 5)}});
    const double mk_total = mean_s_poisson(mk, 10.0, 1e-6);
    const auto mk_levels = mean_s_levels(mk, 10.0, 30);
    double mk_sum = 0;
    for (double v : mk_levels) mk_sum += v;
    CHECK(mk_total == doctest::Approx(mk_sum).epsilon(1e-5));
}

TEST_SUITE_END();
