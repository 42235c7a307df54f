#include "qsc/mc.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "qsc/errors.hpp"
#include "qsc/exact.hpp"
#include "qsc/rng.hpp"

namespace qsc::mc {

namespace {
constexpr uint64_t kPoissonTag = 0x706f6973;  // run-local Poisson stream
constexpr uint64_t kKeysTag = 0x6b657931;     // run-local key master seed
constexpr uint64_t kPermTag = 0x7065726d;     // permutation-test stream

void parallel_for(uint64_t count, unsigned jobs, const std::function<void(uint64_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> threads;
    const unsigned nthreads = std::min<uint64_t>(jobs, count);
    std::exception_ptr first_error;
    std::mutex error_mu;
    for (unsigned w = 0; w < nthreads; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (uint64_t i = w; i < count; i += nthreads) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

Stat mean_stat(const std::vector<double>& xs) {
    const double n = double(xs.size());
    double m = 0;
    for (double x : xs) m += x;
    m /= n;
    double s2 = 0;
    for (double x : xs) s2 += (x - m) * (x - m);
    s2 /= (n - 1);
    return {m, std::sqrt(s2 / n)};
}

double sample_var(const std::vector<double>& xs) {
    const double n = double(xs.size());
    double m = 0;
    for (double x : xs) m += x;
    m /= n;
    double s2 = 0;
    for (double x : xs) s2 += (x - m) * (x - m);
    return s2 / (n - 1);
}

// jackknife SE of an arbitrary leave-one-out statistic
double jackknife_se(const std::vector<double>& loo) {
    const double n = double(loo.size());
    double m = 0;
    for (double v : loo) m += v;
    m /= n;
    double s = 0;
    for (double v : loo) s += (v - m) * (v - m);
    return std::sqrt((n - 1) / n * s);
}

double jackknife_var_se(const std::vector<double>& xs) {
    return jackknife_cov_se(xs, xs);
}
}  // namespace

double sample_cov(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double c = 0;
    for (size_t i = 0; i < x.size(); ++i) c += (x[i] - mx) * (y[i] - my);
    return c / (n - 1);
}

double jackknife_cov_se(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t r = x.size();
    if (r < 3) return 0;
    double sx = 0, sy = 0, sxy = 0;
    for (size_t i = 0; i < r; ++i) {
        sx += x[i];
        sy += y[i];
        sxy += x[i] * y[i];
    }
    std::vector<double> loo(r);
    const double rm1 = double(r - 1);
    for (size_t i = 0; i < r; ++i) {
        const double sxi = sx - x[i], syi = sy - y[i], sxyi = sxy - x[i] * y[i];
        loo[i] = (sxyi - sxi * syi / rm1) / (rm1 - 1);
    }
    return jackknife_se(loo);
}

void ExperimentConfig::validate() const {
    if (!(t > 0)) throw std::invalid_argument("experiment: t must be > 0");
    if (runs < 1) throw std::invalid_argument("experiment: runs must be >= 1");
    if (trie_depth > depth_cap)
        throw std::invalid_argument("experiment: trie_depth must be <= depth_cap");
    size_t cols = 1, level = 1;
    for (size_t k = 0; k < trie_depth; ++k) {
        level *= source.alphabet_size();
        cols += level;
        if (cols > 200000) throw std::invalid_argument("experiment: trie too wide to record");
    }
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<RunRecord> records(config.runs);
    parallel_for(config.runs, config.jobs, [&](uint64_t r) {
        SeqRng pois_rng(derive_seed(config.master_seed, kPoissonTag, r));
        const int64_t n = sample_poisson(pois_rng, config.t);
        const uint64_t key_master = derive_seed(config.master_seed, kKeysTag, r);
        ArrivalSequence seq = ArrivalSequence::generate(config.source, key_master, size_t(n));
        try {
            SortResult sorted = quicksort_instrumented(seq, config.depth_cap);
            RunRecord rec;
            rec.run_index = r;
            rec.n_keys = uint64_t(n);
            rec.key_comparisons = sorted.tally.key_comparisons;
            rec.total_symbols = sorted.tally.total_symbol_comparisons;
            rec.prefix_counts = sorted.tally.prefix_counts.breadth_first(config.trie_depth);
            rec.level_totals = sorted.tally.prefix_counts.level_sums();
            records[r] = std::move(rec);
        } catch (const DepthCapExceeded& e) {
            throw DepthCapExceeded(std::string(e.what()) + " (run " + std::to_string(r) +
                                   ", n = " + std::to_string(n) + ")");
        }
    });
    return records;
}

YEstimates estimate_y(const std::vector<RunRecord>& records, double t, double mean_s,
                      bool mean_s_is_exact, size_t fanout, size_t trie_depth,
                      const std::vector<double>* level_means) {
    if (records.empty()) throw std::invalid_argument("estimate_y: no records");
    YEstimates est;
    est.runs = records.size();
    est.t = t;
    est.centered_by_exact = mean_s_is_exact;

    std::vector<double> totals(records.size());
    for (size_t i = 0; i < records.size(); ++i) totals[i] = double(records[i].total_symbols);
    if (!mean_s_is_exact) {
        mean_s = 0;
        for (double v : totals) mean_s += v;
        mean_s /= double(totals.size());
    }
    est.mean_s_used = mean_s;

    std::vector<double> ys(records.size());
    for (size_t i = 0; i < records.size(); ++i) ys[i] = (totals[i] - mean_s) / t;
    est.mean_y = mean_stat(ys);
    est.var_y = {sample_var(ys), jackknife_var_se(ys)};

    // Y_k(t) from the recorded trie levels
    size_t base = 0, lev = 1;
    for (size_t k = 0; k <= trie_depth; ++k) {
        std::vector<double> sk(records.size(), 0.0);
        for (size_t i = 0; i < records.size(); ++i) {
            double sum = 0;
            for (size_t s = 0; s < lev; ++s) sum += double(records[i].prefix_counts[base + s]);
            sk[i] = sum;
        }
        double center;
        if (level_means && k < level_means->size()) {
            center = (*level_means)[k];
        } else {
            center = 0;
            for (double v : sk) center += v;
            center /= double(sk.size());
        }
        std::vector<double> yk(records.size());
        for (size_t i = 0; i < records.size(); ++i) yk[i] = (sk[i] - center) / t;
        est.level_mean_y.push_back(mean_stat(yk));
        est.level_var_y.push_back({sample_var(yk), jackknife_var_se(yk)});
        base += lev;
        lev *= fanout;
    }
    return est;
}

PrefixCovEstimates estimate_prefix_covariances(const std::vector<RunRecord>& records,
                                               const std::vector<Prefix>& prefixes,
                                               const Alphabet& alphabet, size_t trie_depth) {
    if (records.empty()) throw std::invalid_argument("estimate_prefix_covariances: no records");
    PrefixCovEstimates est;
    est.runs = records.size();
    const size_t m = alphabet.size();
    // dense slot of a prefix in the breadth-first layout
    auto slot_of = [&](const Prefix& w) {
        if (w.size() > trie_depth)
            throw std::invalid_argument("estimate_prefix_covariances: prefix deeper than trie");
        size_t base = 0, lev = 1, path = 0;
        for (size_t k = 0; k < w.size(); ++k) {
            base += lev;
            lev *= m;
            path = path * m + w[k];
        }
        return base + path;
    };
    std::vector<std::vector<double>> series(prefixes.size(),
                                            std::vector<double>(records.size()));
    for (size_t p = 0; p < prefixes.size(); ++p) {
        const size_t slot = slot_of(prefixes[p]);
        for (size_t i = 0; i < records.size(); ++i)
            series[p][i] = double(records[i].prefix_counts[slot]);
        est.prefixes.push_back(prefixes[p].to_string(alphabet));
    }
    est.cov.assign(prefixes.size(), std::vector<Stat>(prefixes.size()));
    for (size_t i = 0; i < prefixes.size(); ++i) {
        for (size_t j = i; j < prefixes.size(); ++j) {
            Stat s{sample_cov(series[i], series[j]), jackknife_cov_se(series[i], series[j])};
            est.cov[i][j] = s;
            est.cov[j][i] = s;
        }
    }
    return est;
}

double PrefixCovEstimates::min_normalized() const {
    double worst = HUGE_VAL;
    for (size_t i = 0; i < cov.size(); ++i)
        for (size_t j = i; j < cov.size(); ++j) {
            const auto& s = cov[i][j];
            if (s.se > 0) worst = std::min(worst, s.value / s.se);
        }
    return worst;
}

namespace {
// two-sample KS distance for integer-valued samples
double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0;
    size_t i = 0, j = 0;
    const double na = double(a.size()), nb = double(b.size());
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / na - double(j) / nb));
    }
    return d;
}
}  // namespace

DistCheckReport check_sw_equals_k_scaled(const SourceModel& source, const Prefix& w, double t,
                                         uint64_t runs, uint64_t seed, uint32_t depth_cap,
                                         unsigned permutations) {
    const double pw = source.prefix_prob(w);
    if (!(pw > 0)) throw std::invalid_argument("check_sw_equals_k_scaled: p_w must be > 0");

    DistCheckReport rep;
    rep.runs = runs;
    rep.t = t;
    rep.scaled_t = pw * t;

    ExperimentConfig a{source, t, runs, derive_seed(seed, 1, 0), w.size(), depth_cap, 1};
    // empty prefix: p_w = 1 and the two experiments coincide by construction
    const uint64_t seed_b = w.empty() ? derive_seed(seed, 1, 0) : derive_seed(seed, 2, 0);
    ExperimentConfig b{source, pw * t, runs, seed_b, 0, depth_cap, 1};
    const auto rec_a = run_experiment(a);
    const auto rec_b = run_experiment(b);

    std::vector<double> xa(rec_a.size()), xb(rec_b.size());
    {
        // S_w readings via the dense layout
        size_t base = 0, lev = 1, path = 0;
        for (size_t k = 0; k < w.size(); ++k) {
            base += lev;
            lev *= source.alphabet_size();
            path = path * source.alphabet_size() + w[k];
        }
        for (size_t i = 0; i < rec_a.size(); ++i)
            xa[i] = double(rec_a[i].prefix_counts[base + path]);
    }
    for (size_t i = 0; i < rec_b.size(); ++i) xb[i] = double(rec_b[i].key_comparisons);

    const Stat ma = mean_stat(xa), mb = mean_stat(xb);
    rep.mean_a = ma.value;
    rep.se_a = ma.se;
    rep.mean_b = mb.value;
    rep.se_b = mb.se;
    rep.var_a = sample_var(xa);
    rep.var_b = sample_var(xb);
    const double se_diff = std::sqrt(ma.se * ma.se + mb.se * mb.se);
    rep.mean_ok = std::abs(ma.value - mb.value) <= 3.0 * se_diff;

    rep.ks_stat = ks_distance(xa, xb);
    // permutation test on the pooled sample
    std::vector<double> pooled = xa;
    pooled.insert(pooled.end(), xb.begin(), xb.end());
    SeqRng prng(derive_seed(seed, kPermTag, 0));
    unsigned at_least = 0;
    for (unsigned p = 0; p < permutations; ++p) {
        // Fisher-Yates with the deterministic stream
        for (size_t i = pooled.size(); i > 1; --i) {
            const size_t j = size_t(prng.unit() * double(i));
            std::swap(pooled[i - 1], pooled[j]);
        }
        std::vector<double> pa(pooled.begin(), pooled.begin() + xa.size());
        std::vector<double> pb(pooled.begin() + xa.size(), pooled.end());
        if (ks_distance(std::move(pa), std::move(pb)) >= rep.ks_stat) ++at_least;
    }
    rep.p_value = double(at_least + 1) / double(permutations + 1);
    rep.p_ok = rep.p_value > 0.01;
    return rep;
}

CondReductionReport check_conditioned_reduction(const SourceModel& source, const Prefix& w1,
                                                const Prefix& w2, double t, uint64_t runs,
                                                uint64_t seed, uint32_t depth_cap) {
    const double p1 = source.prefix_prob(w1);
    if (!(p1 > 0)) throw std::invalid_argument("check_conditioned_reduction: p_{w'} must be > 0");
    const Prefix w = w1.concat(w2);

    CondReductionReport rep;
    rep.runs = runs;
    rep.t = t;
    rep.scaled_t = p1 * t;

    ExperimentConfig ca{source, t, runs, derive_seed(seed, 11, 0), w.size(), depth_cap, 1};
    const SourceModel cond = source.conditioned(w1);
    ExperimentConfig cb{cond, p1 * t, runs, derive_seed(seed, 12, 0), w2.size(), depth_cap, 1};
    const auto rec_a = run_experiment(ca);
    const auto rec_b = run_experiment(cb);

    const size_t m = source.alphabet_size();
    auto slot_of = [m](const Prefix& p) {
        size_t base = 0, lev = 1, path = 0;
        for (size_t k = 0; k < p.size(); ++k) {
            base += lev;
            lev *= m;
            path = path * m + p[k];
        }
        return base + path;
    };
    std::vector<double> a1(rec_a.size()), a2(rec_a.size());
    const size_t s1 = slot_of(w1), s2 = slot_of(w);
    for (size_t i = 0; i < rec_a.size(); ++i) {
        a1[i] = double(rec_a[i].prefix_counts[s1]);
        a2[i] = double(rec_a[i].prefix_counts[s2]);
    }
    std::vector<double> b1(rec_b.size()), b2(rec_b.size());
    const size_t sb2 = slot_of(w2);
    for (size_t i = 0; i < rec_b.size(); ++i) {
        b1[i] = double(rec_b[i].key_comparisons);
        b2[i] = double(rec_b[i].prefix_counts[sb2]);
    }

    auto add_cmp = [&rep](const std::string& name, double va, double vb, double se) {
        CondReductionReport::Pair p{name, va, vb, se, std::abs(va - vb) <= 3.0 * se};
        rep.comparisons.push_back(p);
    };
    const Stat m_a1 = mean_stat(a1), m_a2 = mean_stat(a2);
    const Stat m_b1 = mean_stat(b1), m_b2 = mean_stat(b2);
    add_cmp("mean S_w'", m_a1.value, m_b1.value,
            std::sqrt(m_a1.se * m_a1.se + m_b1.se * m_b1.se));
    add_cmp("mean S_w", m_a2.value, m_b2.value,
            std::sqrt(m_a2.se * m_a2.se + m_b2.se * m_b2.se));
    const double sv_a1 = jackknife_var_se(a1), sv_b1 = jackknife_var_se(b1);
    add_cmp("var S_w'", sample_var(a1), sample_var(b1),
            std::sqrt(sv_a1 * sv_a1 + sv_b1 * sv_b1));
    const double sv_a2 = jackknife_var_se(a2), sv_b2 = jackknife_var_se(b2);
    add_cmp("var S_w", sample_var(a2), sample_var(b2),
            std::sqrt(sv_a2 * sv_a2 + sv_b2 * sv_b2));
    const double sc_a = jackknife_cov_se(a1, a2), sc_b = jackknife_cov_se(b1, b2);
    add_cmp("cov", sample_cov(a1, a2), sample_cov(b1, b2),
            std::sqrt(sc_a * sc_a + sc_b * sc_b));
    return rep;
}

bool CondReductionReport::passed() const {
    for (const auto& c : comparisons)
        if (!c.ok) return false;
    return true;
}

std::string YEstimates::to_json() const {
    nlohmann::json j;
    j["runs"] = runs;
    j["t"] = t;
    j["mean_s_used"] = mean_s_used;
    j["centered_by_exact"] = centered_by_exact;
    j["mean_y"] = {{"value", mean_y.value}, {"se", mean_y.se}};
    j["var_y"] = {{"value", var_y.value}, {"se", var_y.se}};
    j["levels"] = nlohmann::json::array();
    for (size_t k = 0; k < level_mean_y.size(); ++k)
        j["levels"].push_back({{"k", k},
                               {"mean_yk", level_mean_y[k].value},
                               {"mean_yk_se", level_mean_y[k].se},
                               {"var_yk", level_var_y[k].value},
                               {"var_yk_se", level_var_y[k].se}});
    return j.dump(2);
}

std::string PrefixCovEstimates::to_json() const {
    nlohmann::json j;
    j["runs"] = runs;
    j["prefixes"] = prefixes;
    j["cov"] = nlohmann::json::array();
    for (size_t i = 0; i < cov.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (size_t k = 0; k < cov[i].size(); ++k)
            row.push_back({{"value", cov[i][k].value}, {"se", cov[i][k].se}});
        j["cov"].push_back(row);
    }
    j["min_normalized"] = min_normalized();
    return j.dump(2);
}

std::string DistCheckReport::to_json() const {
    nlohmann::json j;
    j["runs"] = runs;
    j["t"] = t;
    j["scaled_t"] = scaled_t;
    j["mean_a"] = mean_a;
    j["se_a"] = se_a;
    j["mean_b"] = mean_b;
    j["se_b"] = se_b;
    j["var_a"] = var_a;
    j["var_b"] = var_b;
    j["ks_stat"] = ks_stat;
    j["p_value"] = p_value;
    j["mean_ok"] = mean_ok;
    j["p_ok"] = p_ok;
    j["passed"] = passed();
    return j.dump(2);
}

std::string CondReductionReport::to_json() const {
    nlohmann::json j;
    j["runs"] = runs;
    j["t"] = t;
    j["scaled_t"] = scaled_t;
    j["comparisons"] = nlohmann::json::array();
    for (const auto& c : comparisons)
        j["comparisons"].push_back(
            {{"name", c.name}, {"a", c.a}, {"b", c.b}, {"se", c.se}, {"ok", c.ok}});
    j["passed"] = passed();
    return j.dump(2);
}

}  // namespace qsc::mc
