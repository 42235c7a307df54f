#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qsc/rational.hpp"
#include "qsc/source.hpp"

namespace qsc::exact {

// kappa_n = E K_n = 2(n+1)H_n - 4n, exact. Cached; the reference stays valid.
const Rational& kappa(size_t n);

// (1/d) sum_{j=e+1}^{e+d} (d-1 + kappa_{j-1-e} + kappa_{e+d-j}); the
// divide-and-conquer recurrence, which must reproduce kappa(d) for every
// shift e.
Rational kappa_via_recurrence(int64_t d, int64_t e);

// Var K_n = 7n^2 - 4(n+1)^2 H_n^(2) - 2(n+1) H_n + 13n, exact.
Rational var_k(size_t n);

// sigma^2 = 7 - 2 pi^2 / 3, the n -> infinity limit of Var K_n / n^2
double sigma_sq();

// 2 n ln n - (4 - 2 gamma) n + 2 ln n + (2 gamma + 1)
double kappa_asymptotic(size_t n);

// float mirrors (long-double accumulation, cached)
double kappa_dbl(size_t n);
double var_k_dbl(size_t n);

// default Poisson series truncation: ceil(t + 12 sqrt(t) + 20)
int64_t poisson_default_nmax(double t);

// e^{-t} sum_n (t^n / n!) f(n), truncated at n_max (default rule above,
// extended while the last term is still above tol/1e3). Caller guarantees
// at-most-polynomial growth of f.
double poisson_mix(const std::function<double(int64_t)>& f, double t, double tol,
                   int64_t n_max_override = -1);

// E K(t) and Var K(t) for K(t) = K_{N(t)}, N ~ Poisson(t), by the law of
// total variance: Var = E Var(K|N) + Var(kappa_N).
double mean_k_poisson(double t, double tol = 1e-10);
double var_k_poisson(double t, double tol = 1e-10);

// sum_j C(n,j) p^j (1-p)^{n-j} kappa_j = E[S_{n,w} | N = n] with p = p_w
double binom_mix_kappa(int64_t n, double p);

// Cov(kappa_N, g(N)) with N ~ Poisson(t) and g(n) = binom_mix_kappa(n, p);
// the conditional-expectation part of Cov(K(t), S_w(t))
double t_w_exact(double p, double t, double tol = 1e-10);

// E S(t) = sum over all prefixes w of E K(p_w t); prefix tree traversed with
// aggregation of equal-probability branches and a geometric tail bound
// (E K(s) <= 2 s^2 for s <= 1) controlling the pruning error.
double mean_s_poisson(const SourceModel& source, double t, double tol = 1e-6);

// E S_k(t) = sum_{w in Sigma^k} E K(p_w t) for k = 0..max_level
std::vector<double> mean_s_levels(const SourceModel& source, double t, size_t max_level,
                                  double tol = 1e-9);

}  // namespace qsc::exact
