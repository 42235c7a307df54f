#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsc/rational.hpp"

namespace qsc::covdp {

// Cov(K_n, S_{n,w} | N_{n,w} = b, N_{n,w-} = a), computed by conditioning on
// the pivot rank j and recursing into the sublists:
//   C(n,a,b) = psi(n,a,b) + (1/n) [ sum_{a<j<=a+b} C(j-1,a,j-1-a) + C(n-j,0,a+b-j)
//                                 + sum_{j<=a}     C(n-j,a-j,b)
//                                 + sum_{j>a+b}    C(j-1,a,b) ],
// with C = 0 for n <= 1 or b = 0. Filled bottom-up in n.
class CovTable {
  public:
    // exact rational table for all states with n <= n_cap
    static CovTable exact_table(int64_t n_cap);
    // float table (same recursion in doubles), for the Poisson mixing
    static CovTable float_table(int64_t n_cap);

    int64_t n_cap() const { return n_cap_; }
    bool is_exact() const { return exact_; }

    const Rational& value_exact(int64_t n, int64_t a, int64_t b) const;
    double value(int64_t n, int64_t a, int64_t b) const;

    // smallest stored value (exact mode), for the nonnegativity audit
    Rational min_value_exact() const;
    double min_value() const;

    std::string to_csv() const;  // rows n,a,b,numerator,denominator or n,a,b,value

  private:
    CovTable(int64_t n_cap, bool exact) : n_cap_(n_cap), exact_(exact) {}
    size_t index(int64_t n, int64_t a, int64_t b) const;

    int64_t n_cap_;
    bool exact_;
    std::vector<Rational> exact_values_;
    std::vector<double> float_values_;
    std::vector<size_t> layer_offset_;
};

// convenience single-state evaluations backed by process-wide tables
Rational cov_conditional_exact(int64_t n, int64_t a, int64_t b);
double cov_conditional(int64_t n, int64_t a, int64_t b);

// Exact Cov(K_n, S_group) over all n! arrival orders with the group fixed to
// ranks (a, a+b]; the independent oracle for the recursion. n <= 10.
Rational cov_brute(int64_t n, int64_t a, int64_t b);

struct PoissonCovResult {
    double value = 0;        // Cov(K(t), S_w(t)) = t_w + v_w
    double t_w = 0;          // between-N part Cov(kappa_N, E[S_w | N])
    double v_w = 0;          // within-N part E Cov(K_n, S_{n,w})
    double dropped_mass = 0; // multinomial cells below the cell floor
    double tail_bound = 0;   // Poisson tail beyond n_cap, bounded by n^2 mass
    bool truncation_ok = true;
};

// Cov(K(t), S_w(t)) for a prefix with probability p_w and strictly-smaller
// mass p_wminus, assembled from the float table and Poisson/multinomial
// weights truncated at n_cap (default rule when n_cap <= 0).
PoissonCovResult cov_k_sw_exact(double p_w, double p_wminus, double t, double tol = 1e-9,
                                int64_t n_cap = -1);

}  // namespace qsc::covdp
