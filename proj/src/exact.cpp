#include "qsc/exact.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "qsc/harmonic.hpp"

namespace qsc::exact {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

struct KappaCache {
    std::deque<Rational> values{Rational(0)};
    std::mutex mu;
    const Rational& get(size_t n) {
        std::lock_guard lock(mu);
        while (values.size() <= n) {
            const size_t k = values.size();
            // kappa_k = kappa_{k-1} + 2 H_k - 2
            Rational v = values.back();
            v += Rational(2) * harmonics().h1(k);
            v -= Rational(2);
            values.push_back(std::move(v));
        }
        return values[n];
    }
};

KappaCache& kappa_cache() {
    static KappaCache c;
    return c;
}

// float harmonic/kappa mirrors with long-double accumulation
struct FloatCaches {
    std::vector<double> h1{0.0}, h2{0.0}, kap{0.0};
    long double h1_acc = 0, h2_acc = 0;
    std::mutex mu;
    void grow(size_t n) {
        while (h1.size() <= n) {
            const long double k = static_cast<long double>(h1.size());
            h1_acc += 1.0L / k;
            h2_acc += 1.0L / (k * k);
            h1.push_back(double(h1_acc));
            h2.push_back(double(h2_acc));
            kap.push_back(double(2.0L * (k + 1) * h1_acc - 4.0L * k));
        }
    }
};

FloatCaches& float_caches() {
    static FloatCaches c;
    return c;
}

}  // namespace

const Rational& kappa(size_t n) { return kappa_cache().get(n); }

Rational kappa_via_recurrence(int64_t d, int64_t e) {
    if (d < 1) throw std::invalid_argument("kappa_via_recurrence: d must be >= 1");
    if (e < 0) throw std::invalid_argument("kappa_via_recurrence: e must be >= 0");
    kappa(size_t(d));  // pre-grow so per-term lookups are cheap
    RationalSum sum;
    sum.add(Rational(d * (d - 1)));  // the d copies of (d - 1)
    for (int64_t j = e + 1; j <= e + d; ++j) {
        sum.add(kappa(size_t(j - 1 - e)));
        sum.add(kappa(size_t(e + d - j)));
    }
    return sum.value() / Rational(d);
}

Rational var_k(size_t n) {
    const int64_t ni = int64_t(n);
    const Rational& h1 = harmonics().h1(n);
    const Rational& h2 = harmonics().h2(n);
    Rational r(7 * ni * ni + 13 * ni);
    r -= Rational(4 * (ni + 1) * (ni + 1)) * h2;
    r -= Rational(2 * (ni + 1)) * h1;
    return r;
}

double sigma_sq() {
    return 7.0 - 2.0 * std::numbers::pi * std::numbers::pi / 3.0;
}

double kappa_asymptotic(size_t n) {
    if (n < 1) throw std::invalid_argument("kappa_asymptotic: n must be >= 1");
    const double x = double(n);
    return 2 * x * std::log(x) - (4 - 2 * kEulerGamma) * x + 2 * std::log(x) +
           (2 * kEulerGamma + 1);
}

double kappa_dbl(size_t n) {
    auto& c = float_caches();
    std::lock_guard lock(c.mu);
    c.grow(n);
    return c.kap[n];
}

double var_k_dbl(size_t n) {
    auto& c = float_caches();
    std::lock_guard lock(c.mu);
    c.grow(n);
    const double x = double(n);
    return 7 * x * x - 4 * (x + 1) * (x + 1) * c.h2[n] - 2 * (x + 1) * c.h1[n] + 13 * x;
}

int64_t poisson_default_nmax(double t) {
    return int64_t(std::ceil(t + 12.0 * std::sqrt(t) + 20.0));
}

double poisson_mix(const std::function<double(int64_t)>& f, double t, double tol,
                   int64_t n_max_override) {
    if (!(t >= 0)) throw std::invalid_argument("poisson_mix: t must be >= 0");
    if (t == 0.0) return f(0);
    int64_t n_max = n_max_override > 0 ? n_max_override : poisson_default_nmax(t);
    const int64_t hard_cap = n_max + int64_t(30.0 * std::sqrt(t)) + 1000;

    // pmf by ratio updates outward from the mode, to stay in range for large t
    const int64_t mode = int64_t(t);
    std::vector<double> pmf(size_t(n_max) + 1, 0.0);
    const int64_t m0 = std::min(mode, n_max);
    double log_pm = double(m0) * std::log(t) - t - std::lgamma(double(m0) + 1);
    pmf[size_t(m0)] = std::exp(log_pm);
    for (int64_t n = m0; n > 0; --n) pmf[size_t(n - 1)] = pmf[size_t(n)] * double(n) / t;
    for (int64_t n = m0; n < n_max; ++n) pmf[size_t(n) + 1] = pmf[size_t(n)] * t / double(n + 1);

    double sum = 0.0;
    for (int64_t n = 0; n <= n_max; ++n) sum += pmf[size_t(n)] * f(n);

    // extend while the last term is still material relative to tol
    double tail_pmf = pmf.back();
    int64_t n = n_max;
    while (n < hard_cap) {
        const double term = tail_pmf * f(n);
        if (std::abs(term) <= tol * 1e-3 && tail_pmf < 1e-12) break;
        ++n;
        tail_pmf *= t / double(n);
        sum += tail_pmf * f(n);
    }
    return sum;
}

double mean_k_poisson(double t, double tol) {
    return poisson_mix([](int64_t n) { return kappa_dbl(size_t(n)); }, t, tol);
}

double var_k_poisson(double t, double tol) {
    if (t == 0.0) return 0.0;
    const double mean = mean_k_poisson(t, tol);
    const double within = poisson_mix([](int64_t n) { return var_k_dbl(size_t(n)); }, t, tol);
    const double between = poisson_mix(
        [mean](int64_t n) {
            const double d = kappa_dbl(size_t(n)) - mean;
            return d * d;
        },
        t, tol);
    return within + between;
}

double binom_mix_kappa(int64_t n, double p) {
    if (n < 0) throw std::invalid_argument("binom_mix_kappa: n must be >= 0");
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return kappa_dbl(size_t(n));
    if (n == 0) return 0.0;
    // walk the binomial pmf outward from its mode
    const int64_t jm = std::clamp(int64_t(double(n + 1) * p), int64_t(0), n);
    const double log_pm = std::lgamma(double(n) + 1) - std::lgamma(double(jm) + 1) -
                          std::lgamma(double(n - jm) + 1) + double(jm) * std::log(p) +
                          double(n - jm) * std::log1p(-p);
    const double ratio = p / (1.0 - p);
    double sum = 0.0;
    double pj = std::exp(log_pm);
    for (int64_t j = jm;; --j) {
        sum += pj * kappa_dbl(size_t(j));
        if (j == 0 || pj < 1e-18) break;
        pj *= double(j) / (double(n - j + 1) * ratio);
    }
    pj = std::exp(log_pm);
    for (int64_t j = jm; j < n;) {
        pj *= double(n - j) * ratio / double(j + 1);
        ++j;
        sum += pj * kappa_dbl(size_t(j));
        if (pj < 1e-18 && j > jm + 4) break;
    }
    return sum;
}

double t_w_exact(double p, double t, double tol) {
    if (t == 0.0 || p <= 0.0) return 0.0;
    const int64_t n_max = poisson_default_nmax(t);
    std::vector<double> g(size_t(n_max) + 1);
    for (int64_t n = 0; n <= n_max; ++n) g[size_t(n)] = binom_mix_kappa(n, p);
    auto gf = [&g, p](int64_t n) {
        return size_t(n) < g.size() ? g[size_t(n)] : binom_mix_kappa(n, p);
    };
    const double mk = mean_k_poisson(t, tol);
    const double mg = poisson_mix(gf, t, tol);
    return poisson_mix(
        [&](int64_t n) { return (kappa_dbl(size_t(n)) - mk) * (gf(n) - mg); }, t, tol);
}

namespace {

// Aggregated prefix-tree traversal: nodes with identical probability are
// grouped, keyed by the exponent profile of the probability factors (and the
// trailing state for Markov chains), so uniform-ish sources stay polynomial.
struct NodeGroup {
    uint32_t state;               // last symbol; unused for memoryless
    std::vector<uint16_t> expo;   // factor exponents
    double count;
    double prob;  // p_w of one member

    bool operator<(const NodeGroup& o) const {
        if (state != o.state) return state < o.state;
        return expo < o.expo;
    }
};

double group_prob(const SourceModel& s, uint32_t first_sym, const std::vector<uint16_t>& expo) {
    const size_t m = s.alphabet_size();
    double p = 1.0;
    if (s.kind() == SourceModel::Kind::memoryless) {
        for (size_t i = 0; i < m; ++i)
            if (expo[i]) p *= std::pow(s.first_dist()[i], int(expo[i]));
        return p;
    }
    p = s.first_dist()[first_sym];
    for (size_t a = 0; a < m; ++a)
        for (size_t b = 0; b < m; ++b) {
            const uint16_t e = expo[a * m + b];
            if (e) p *= std::pow(s.next_dist(uint32_t(a))[b], int(e));
        }
    return p;
}

// One traversal level: expand each group by every next symbol.
std::map<NodeGroup, double> expand_level(const SourceModel& s,
                                         const std::vector<NodeGroup>& groups, size_t level) {
    const size_t m = s.alphabet_size();
    const bool memless = s.kind() == SourceModel::Kind::memoryless;
    std::map<NodeGroup, double> next;
    for (const auto& g : groups) {
        for (uint32_t sym = 0; sym < m; ++sym) {
            const auto& dist = level == 0 ? s.first_dist() : s.next_dist(g.state);
            if (dist[sym] <= 0.0) continue;
            NodeGroup child;
            child.count = g.count;
            child.prob = 0;
            if (memless) {
                child.state = 0;
                child.expo = g.expo;
                child.expo[sym]++;
            } else {
                child.state = sym;
                child.expo = g.expo;
                if (level == 0) {
                    // first symbol: remember it via a dedicated slot layout:
                    // expo[m*m + sym] marks the initial factor
                    child.expo[m * m + sym] = 1;
                } else {
                    child.expo[g.state * m + sym]++;
                }
            }
            auto [it, inserted] = next.try_emplace(child, child.count);
            if (!inserted) it->second += child.count;
        }
    }
    return next;
}

std::vector<NodeGroup> materialize(const SourceModel& s, std::map<NodeGroup, double>&& m_groups) {
    std::vector<NodeGroup> out;
    out.reserve(m_groups.size());
    const size_t m = s.alphabet_size();
    for (auto& [g, count] : m_groups) {
        NodeGroup ng = g;
        ng.count = count;
        uint32_t first_sym = 0;
        if (s.kind() == SourceModel::Kind::markov) {
            for (uint32_t i = 0; i < m; ++i)
                if (g.expo[m * m + i]) first_sym = i;
        }
        ng.prob = group_prob(s, first_sym, ng.expo);
        out.push_back(std::move(ng));
    }
    return out;
}

std::vector<NodeGroup> root_group(const SourceModel& s) {
    const size_t m = s.alphabet_size();
    NodeGroup root;
    root.state = 0;
    root.count = 1.0;
    root.prob = 1.0;
    root.expo.assign(s.kind() == SourceModel::Kind::memoryless ? m : m * m + m, 0);
    return {root};
}

}  // namespace

double mean_s_poisson(const SourceModel& source, double t, double tol) {
    if (!(t >= 0)) throw std::invalid_argument("mean_s_poisson: t must be >= 0");
    if (t == 0.0) return 0.0;
    const double q = source.sq_mass_decay();
    if (q >= 1.0)
        throw std::domain_error("mean_s_poisson: source fails the summability condition");

    double total = 0.0;
    std::vector<NodeGroup> groups = root_group(source);
    const size_t level_cap = 400;
    for (size_t level = 0; level < level_cap && !groups.empty(); ++level) {
        // tail bound over this level and everything below it
        double sq_mass = 0.0;
        bool all_small = true;
        for (const auto& g : groups) {
            sq_mass += g.count * g.prob * g.prob;
            all_small = all_small && g.prob * t <= 1.0;
        }
        if (all_small && 2.0 * t * t * sq_mass / (1.0 - q) <= tol) return total;
        for (const auto& g : groups) total += g.count * mean_k_poisson(g.prob * t, tol * 1e-3);
        groups = materialize(source, expand_level(source, groups, level));
    }
    throw std::domain_error("mean_s_poisson: condition sums not flattening (level cap reached)");
}

std::vector<double> mean_s_levels(const SourceModel& source, double t, size_t max_level,
                                  double tol) {
    std::vector<double> out;
    out.reserve(max_level + 1);
    std::vector<NodeGroup> groups = root_group(source);
    for (size_t level = 0; level <= max_level; ++level) {
        double level_mean = 0.0;
        for (const auto& g : groups)
            level_mean += g.count * mean_k_poisson(g.prob * t, tol);
        out.push_back(level_mean);
        if (level < max_level) groups = materialize(source, expand_level(source, groups, level));
    }
    return out;
}

}  // namespace qsc::exact
