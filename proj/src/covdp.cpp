#include "qsc/covdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qsc/exact.hpp"
#include "qsc/lemmas.hpp"
#include "qsc/sorter.hpp"

namespace qsc::covdp {

namespace {
void check_state(int64_t n, int64_t a, int64_t b, const char* who) {
    if (n < 0 || a < 0 || b < 0 || a + b > n)
        throw std::invalid_argument(std::string(who) + ": need 0 <= a, 0 <= b, a + b <= n");
}

// psi in doubles, mirroring lemmas::psi; kap is a prefetched kappa table
double psi_dbl(int64_t n, int64_t a, int64_t b, const std::vector<double>& kap) {
    double sum = 0;
    const double kn = kap[size_t(n)];
    const double kb = kap[size_t(b)];
    for (int64_t j = a + 1; j <= a + b; ++j) {
        const double f = double(n - 1) + kap[size_t(j - 1)] + kap[size_t(n - j)] - kn;
        const double c = double(b - 1) + kap[size_t(j - 1 - a)] + kap[size_t(a + b - j)] - kb;
        sum += f * c;
    }
    return sum / double(n);
}
}  // namespace

size_t CovTable::index(int64_t n, int64_t a, int64_t b) const {
    // states for fixed n: a = 0..n, b = 0..n-a -> offset a*(n+1) - a(a-1)/2 + b
    return layer_offset_[size_t(n)] + size_t(a * (n + 1) - a * (a - 1) / 2 + b);
}

CovTable CovTable::exact_table(int64_t n_cap) {
    if (n_cap < 0) throw std::invalid_argument("CovTable: n_cap must be >= 0");
    CovTable t(n_cap, true);
    t.layer_offset_.resize(size_t(n_cap) + 1, 0);
    size_t total = 0;
    for (int64_t n = 0; n <= n_cap; ++n) {
        t.layer_offset_[size_t(n)] = total;
        total += size_t((n + 1) * (n + 2) / 2);
    }
    t.exact_values_.assign(total, Rational(0));
    for (int64_t n = 2; n <= n_cap; ++n) {
        for (int64_t a = 0; a <= n; ++a) {
            for (int64_t b = 1; a + b <= n; ++b) {
                RationalSum rec;
                for (int64_t j = a + 1; j <= a + b; ++j) {
                    rec.add(t.exact_values_[t.index(j - 1, a, j - 1 - a)]);
                    rec.add(t.exact_values_[t.index(n - j, 0, a + b - j)]);
                }
                for (int64_t j = 1; j <= a; ++j)
                    rec.add(t.exact_values_[t.index(n - j, a - j, b)]);
                for (int64_t j = a + b + 1; j <= n; ++j)
                    rec.add(t.exact_values_[t.index(j - 1, a, b)]);
                Rational v = lemmas::psi(n, a, b);
                v += rec.value() / Rational(n);
                t.exact_values_[t.index(n, a, b)] = std::move(v);
            }
        }
    }
    return t;
}

CovTable CovTable::float_table(int64_t n_cap) {
    if (n_cap < 0) throw std::invalid_argument("CovTable: n_cap must be >= 0");
    CovTable t(n_cap, false);
    t.layer_offset_.resize(size_t(n_cap) + 1, 0);
    size_t total = 0;
    for (int64_t n = 0; n <= n_cap; ++n) {
        t.layer_offset_[size_t(n)] = total;
        total += size_t((n + 1) * (n + 2) / 2);
    }
    t.float_values_.assign(total, 0.0);
    std::vector<double> kap(size_t(n_cap) + 1);
    for (int64_t i = 0; i <= n_cap; ++i) kap[size_t(i)] = exact::kappa_dbl(size_t(i));
    for (int64_t n = 2; n <= n_cap; ++n) {
        for (int64_t a = 0; a <= n; ++a) {
            for (int64_t b = 1; a + b <= n; ++b) {
                double rec = 0;
                for (int64_t j = a + 1; j <= a + b; ++j) {
                    rec += t.float_values_[t.index(j - 1, a, j - 1 - a)];
                    rec += t.float_values_[t.index(n - j, 0, a + b - j)];
                }
                for (int64_t j = 1; j <= a; ++j)
                    rec += t.float_values_[t.index(n - j, a - j, b)];
                for (int64_t j = a + b + 1; j <= n; ++j)
                    rec += t.float_values_[t.index(j - 1, a, b)];
                t.float_values_[t.index(n, a, b)] = psi_dbl(n, a, b, kap) + rec / double(n);
            }
        }
    }
    return t;
}

const Rational& CovTable::value_exact(int64_t n, int64_t a, int64_t b) const {
    check_state(n, a, b, "CovTable");
    if (!exact_) throw std::logic_error("CovTable: float table has no exact values");
    if (n > n_cap_) throw std::out_of_range("CovTable: n beyond table cap");
    return exact_values_[index(n, a, b)];
}

double CovTable::value(int64_t n, int64_t a, int64_t b) const {
    check_state(n, a, b, "CovTable");
    if (n > n_cap_) throw std::out_of_range("CovTable: n beyond table cap");
    return exact_ ? exact_values_[index(n, a, b)].to_double() : float_values_[index(n, a, b)];
}

Rational CovTable::min_value_exact() const {
    Rational m = exact_values_.empty() ? Rational(0) : exact_values_[0];
    for (const auto& v : exact_values_)
        if (v < m) m = v;
    return m;
}

double CovTable::min_value() const {
    if (exact_) return min_value_exact().to_double();
    double m = float_values_.empty() ? 0.0 : float_values_[0];
    for (double v : float_values_) m = std::min(m, v);
    return m;
}

std::string CovTable::to_csv() const {
    std::ostringstream os;
    os << (exact_ ? "n,a,b,numerator,denominator\n" : "n,a,b,value\n");
    for (int64_t n = 0; n <= n_cap_; ++n) {
        for (int64_t a = 0; a <= n; ++a) {
            for (int64_t b = 0; a + b <= n; ++b) {
                os << n << ',' << a << ',' << b << ',';
                if (exact_) {
                    const Rational& v = exact_values_[index(n, a, b)];
                    os << v.num().to_string() << ',' << v.den().to_string() << '\n';
                } else {
                    char buf[40];
                    std::snprintf(buf, sizeof buf, "%.17g", float_values_[index(n, a, b)]);
                    os << buf << '\n';
                }
            }
        }
    }
    return os.str();
}

namespace {
struct SharedTables {
    std::mutex mu;
    std::shared_ptr<const CovTable> exact_table;
    std::shared_ptr<const CovTable> float_table;
};
SharedTables& shared_tables() {
    static SharedTables t;
    return t;
}

std::shared_ptr<const CovTable> float_table_at_least(int64_t n_cap) {
    auto& sh = shared_tables();
    std::lock_guard lock(sh.mu);
    if (!sh.float_table || sh.float_table->n_cap() < n_cap)
        sh.float_table =
            std::make_shared<const CovTable>(CovTable::float_table(std::max(n_cap, int64_t(128))));
    return sh.float_table;
}
}  // namespace

Rational cov_conditional_exact(int64_t n, int64_t a, int64_t b) {
    check_state(n, a, b, "cov_conditional");
    auto& sh = shared_tables();
    std::lock_guard lock(sh.mu);
    if (!sh.exact_table || sh.exact_table->n_cap() < n)
        sh.exact_table =
            std::make_shared<const CovTable>(CovTable::exact_table(std::max(n, int64_t(32))));
    return sh.exact_table->value_exact(n, a, b);
}

double cov_conditional(int64_t n, int64_t a, int64_t b) {
    check_state(n, a, b, "cov_conditional");
    return float_table_at_least(n)->value(n, a, b);
}

Rational cov_brute(int64_t n, int64_t a, int64_t b) {
    check_state(n, a, b, "cov_brute");
    if (n > 10) throw std::invalid_argument("cov_brute: n too large (max 10)");
    std::vector<uint32_t> perm(size_t(n), 0);
    std::iota(perm.begin(), perm.end(), 1);
    int64_t count = 0;
    int64_t sum_k = 0, sum_s = 0;
    int64_t sum_ks = 0;
    do {
        const auto counts = quicksort_ranks_grouped(perm, uint32_t(a), uint32_t(b));
        sum_k += int64_t(counts.key_comparisons);
        sum_s += int64_t(counts.group_comparisons);
        sum_ks += int64_t(counts.key_comparisons * counts.group_comparisons);
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    const Rational mean_ks(sum_ks, count);
    const Rational mean_k(sum_k, count);
    const Rational mean_s(sum_s, count);
    return mean_ks - mean_k * mean_s;
}

PoissonCovResult cov_k_sw_exact(double p_w, double p_wminus, double t, double tol,
                                int64_t n_cap) {
    if (p_w < 0 || p_wminus < 0 || p_w + p_wminus > 1.0 + 1e-12)
        throw std::invalid_argument("cov_k_sw_exact: need p_w, p_wminus >= 0, sum <= 1");
    PoissonCovResult res;
    if (t == 0.0 || p_w == 0.0) return res;
    if (n_cap <= 0) n_cap = exact::poisson_default_nmax(t);

    res.t_w = exact::t_w_exact(p_w, t, tol);

    const auto table_ptr = float_table_at_least(n_cap);
    const CovTable& table = *table_ptr;
    const double cell_floor = tol / (double(n_cap) * double(n_cap));

    // Poisson pmf over n, then multinomial (a, b) cells
    std::vector<double> pois(size_t(n_cap) + 1);
    {
        const int64_t mode = std::min(int64_t(t), n_cap);
        double lp = double(mode) * std::log(t) - t - std::lgamma(double(mode) + 1);
        pois[size_t(mode)] = std::exp(lp);
        for (int64_t n = mode; n > 0; --n) pois[size_t(n - 1)] = pois[size_t(n)] * double(n) / t;
        for (int64_t n = mode; n < n_cap; ++n) pois[size_t(n) + 1] = pois[size_t(n)] * t / double(n + 1);
    }

    double v_w = 0;
    double dropped = 0;
    for (int64_t n = 2; n <= n_cap; ++n) {
        const double pn = pois[size_t(n)];
        if (pn <= 0) continue;
        // N_{n,w-} ~ Binomial(n, p_wminus); given that, N_{n,w} ~ Binomial(n-a, p_w/(1-p_wminus))
        const double pcond = p_wminus < 1.0 ? std::min(p_w / (1.0 - p_wminus), 1.0) : 0.0;
        double pa = std::pow(1.0 - p_wminus, double(n));  // a = 0
        for (int64_t a = 0; a <= n; ++a) {
            if (a > 0) pa *= double(n - a + 1) / double(a) * (p_wminus / (1.0 - p_wminus));
            if (pa * pn < cell_floor && a > int64_t(double(n) * p_wminus)) break;
            const int64_t m = n - a;
            double pb;
            if (pcond >= 1.0)
                pb = 0.0;  // handled at b == m below
            else
                pb = std::pow(1.0 - pcond, double(m));
            for (int64_t b = 0; b <= m; ++b) {
                if (pcond >= 1.0) {
                    pb = (b == m) ? 1.0 : 0.0;
                } else if (b > 0) {
                    pb *= double(m - b + 1) / double(b) * (pcond / (1.0 - pcond));
                }
                const double w = pn * pa * pb;
                if (w < cell_floor) {
                    dropped += w;
                    continue;
                }
                if (b >= 2) v_w += w * table.value(n, a, b);
            }
        }
    }
    res.v_w = v_w;
    res.dropped_mass = dropped;

    // tail beyond n_cap: |Cov(K_n, S_{n,w})| <= sqrt(VarK_n VarS) <= VarK_n <= n^2
    double tail = 0;
    {
        double pn = pois[size_t(n_cap)];
        double nn = double(n_cap);
        for (int i = 0; i < 200; ++i) {
            pn *= t / (nn + 1);
            nn += 1;
            tail += pn * nn * nn;
            if (pn * nn * nn < tol * 1e-6) break;
        }
    }
    res.tail_bound = tail;
    res.truncation_ok = tail <= tol;
    res.value = res.t_w + res.v_w;
    return res;
}

}  // namespace qsc::covdp
