#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsc/keys.hpp"
#include "qsc/sorter.hpp"
#include "qsc/source.hpp"

namespace qsc::mc {

struct ExperimentConfig {
    SourceModel source;
    double t = 1.0;            // Poisson rate x time
    uint64_t runs = 1;
    uint64_t master_seed = 0;
    size_t trie_depth = 3;     // recorded prefix depth
    uint32_t depth_cap = kDefaultDepthCap;
    unsigned jobs = 1;

    void validate() const;
};

// One Poissonized experiment: n_keys ~ Poisson(t), keys sorted instrumented.
// prefix_counts is dense breadth-first over all prefixes of length <=
// trie_depth (the frozen CSV column order); level_totals covers every level
// actually reached, so the per-run identities stay checkable.
struct RunRecord {
    uint64_t run_index = 0;
    uint64_t n_keys = 0;
    uint64_t key_comparisons = 0;
    uint64_t total_symbols = 0;
    std::vector<uint64_t> prefix_counts;
    std::vector<uint64_t> level_totals;
};

std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

struct Stat {
    double value = 0;
    double se = 0;
};

struct YEstimates {
    uint64_t runs = 0;
    double t = 0;
    double mean_s_used = 0;     // centering constant for Y(t)
    bool centered_by_exact = false;  // false: pooled sample mean fallback
    Stat mean_y;                // expect ~ 0
    Stat var_y;
    std::vector<Stat> level_mean_y;  // Y_k(t) means, k <= trie_depth
    std::vector<Stat> level_var_y;
    std::string to_json() const;
};

// Y(t) = (S(t) - E S(t)) / t per run; level decomposition uses the recorded
// prefix trie (fanout = alphabet size, depth = the config's trie_depth).
// Pass exact level means when centering levels exactly, else pooled means
// are used and flagged.
YEstimates estimate_y(const std::vector<RunRecord>& records, double t, double mean_s,
                      bool mean_s_is_exact, size_t fanout, size_t trie_depth,
                      const std::vector<double>* level_means = nullptr);

struct PrefixCovEstimates {
    std::vector<std::string> prefixes;
    uint64_t runs = 0;
    std::vector<std::vector<Stat>> cov;  // symmetric; diagonal = variances
    std::string to_json() const;
    double min_normalized() const;  // min over pairs of cov / se (se > 0)
};

// sample covariance matrix of the S_w(t) readings with jackknife SEs
PrefixCovEstimates estimate_prefix_covariances(const std::vector<RunRecord>& records,
                                               const std::vector<Prefix>& prefixes,
                                               const Alphabet& alphabet, size_t trie_depth);

struct DistCheckReport {
    uint64_t runs = 0;
    double t = 0, scaled_t = 0;
    double mean_a = 0, se_a = 0, mean_b = 0, se_b = 0;
    double var_a = 0, var_b = 0;
    double ks_stat = 0;
    double p_value = 0;
    bool mean_ok = false;
    bool p_ok = false;  // p_value > 0.01
    bool passed() const { return mean_ok && p_ok; }
    std::string to_json() const;
};

// Distributional identity S_w(t) ~ K(p_w t): experiment A reads S_w under
// the full source at t, experiment B reads key comparisons at p_w t; compares
// means (3 SE) and the two-sample CDF distance with a permutation p-value.
DistCheckReport check_sw_equals_k_scaled(const SourceModel& source, const Prefix& w, double t,
                                         uint64_t runs, uint64_t seed,
                                         uint32_t depth_cap = kDefaultDepthCap,
                                         unsigned permutations = 500);

struct CondReductionReport {
    uint64_t runs = 0;
    double t = 0, scaled_t = 0;
    struct Pair {
        std::string name;
        double a = 0, b = 0, se = 0;  // se of the difference
        bool ok = false;
    };
    std::vector<Pair> comparisons;  // mean1, mean2, var1, var2, cov
    bool passed() const;
    std::string to_json() const;
};

// Conditioned-source reduction: the joint law of (S_{w'}(t), S_{w'w''}(t))
// under mu equals that of (K(p_{w'} t), S_{w''}(p_{w'} t)) under mu
// conditioned on w'. Five moment comparisons at 3 SE.
CondReductionReport check_conditioned_reduction(const SourceModel& source, const Prefix& w1,
                                                const Prefix& w2, double t, uint64_t runs,
                                                uint64_t seed,
                                                uint32_t depth_cap = kDefaultDepthCap);

// jackknife standard error of the sample covariance of (x, y)
double jackknife_cov_se(const std::vector<double>& x, const std::vector<double>& y);
double sample_cov(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qsc::mc
