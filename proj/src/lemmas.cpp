#include "qsc/lemmas.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "qsc/exact.hpp"
#include "qsc/harmonic.hpp"

namespace qsc::lemmas {

using exact::kappa;

CoreTermTable::CoreTermTable(int64_t b) : b_(b) {
    if (b < 0) throw std::invalid_argument("CoreTermTable: b must be >= 0");
    values_.reserve(size_t(b));
    const Rational& kb = kappa(size_t(b));
    for (int64_t j = 1; j <= b; ++j) {
        Rational c(b - 1);
        c += kappa(size_t(j - 1));
        c += kappa(size_t(b - j));
        c -= kb;
        values_.push_back(std::move(c));
    }
}

const CoreTermTable& core_terms(int64_t b) {
    static std::map<int64_t, CoreTermTable> cache;
    static std::mutex mu;
    std::lock_guard lock(mu);
    auto it = cache.find(b);
    if (it == cache.end()) it = cache.emplace(b, CoreTermTable(b)).first;
    return it->second;
}

namespace {
void check_domain(int64_t n, int64_t a, int64_t b, const char* who) {
    if (n < 0 || a < 0 || b < 0 || a + b > n)
        throw std::invalid_argument(std::string(who) + ": need 0 <= a, 0 <= b, a + b <= n");
}
}  // namespace

Rational delta2(int64_t n, int64_t a, int64_t b) {
    check_domain(n, a, b, "delta2");
    const auto& core = core_terms(b);
    RationalSum sum;
    for (int64_t j = 1; j <= b; ++j)
        sum.add(core.term(j) / Rational(n + 2 - j - a));
    return Rational(2) * sum.value();
}

Rational delta1(int64_t n, int64_t a, int64_t b) {
    check_domain(n, a, b, "delta1");
    const auto& core = core_terms(b);
    RationalSum sum;
    for (int64_t j = 1; j <= b; ++j)
        sum.add(harmonics().h1(size_t(n + 1 - j - a)) * core.term(j));
    return Rational(2) * sum.value();
}

Rational lambda1(int64_t a, int64_t b) {
    if (a < 0 || b < 0) throw std::invalid_argument("lambda1: a, b must be >= 0");
    const auto& core = core_terms(b);
    RationalSum sum;
    for (int64_t j = 1; j <= b; ++j)
        sum.add(harmonics().h1(size_t(j + a)) * core.term(j));
    return Rational(2) * sum.value();
}

Rational lambda(int64_t a, int64_t b) {
    if (a < 0 || b < 0) throw std::invalid_argument("lambda: a, b must be >= 0");
    const auto& core = core_terms(b);
    RationalSum sum;
    for (int64_t j = 1; j <= b; ++j)
        sum.add(kappa(size_t(j + a - 1)) * core.term(j));
    return sum.value();
}

Rational big_sigma(int64_t n, int64_t a, int64_t b) {
    check_domain(n, a, b, "big_sigma");
    const auto& core = core_terms(b);
    RationalSum sum;
    for (int64_t j = 1; j <= b; ++j) {
        Rational k = kappa(size_t(j + a - 1));
        k += kappa(size_t(n - j - a));
        sum.add(k * core.term(j));
    }
    return sum.value();
}

Rational psi(int64_t n, int64_t a, int64_t b) {
    check_domain(n, a, b, "psi");
    if (n < 1) throw std::invalid_argument("psi: n must be >= 1");
    const Rational& kn = kappa(size_t(n));
    const auto& core = core_terms(b);
    RationalSum sum;
    for (int64_t j = a + 1; j <= a + b; ++j) {
        Rational f(n - 1);
        f += kappa(size_t(j - 1));
        f += kappa(size_t(n - j));
        f -= kn;
        sum.add(f * core.term(j - a));
    }
    return sum.value() / Rational(n);
}

Rational kaplim_sum(int64_t m, int64_t b) {
    if (b < 0 || m < b) throw std::invalid_argument("kaplim_sum: need m >= b >= 0");
    const auto& core = core_terms(b);
    RationalSum sum;
    for (int64_t j = 1; j <= b; ++j)
        sum.add(kappa(size_t(m - j)) * core.term(j));
    return sum.value();
}

namespace {

struct ShardResult {
    uint64_t checks = 0;
    std::map<std::string, uint64_t> sign_checks;
    std::vector<SignViolation> violations;
    std::map<std::string, ExtremalValue> extremal;
    bool identities_ok = true;
    std::string first_identity_failure;
};

void track_extremal(std::map<std::string, ExtremalValue>& ext, const std::string& name,
                    int64_t n, int64_t a, int64_t b, const Rational& v) {
    if (v.is_zero()) return;
    auto& slot = ext[name];
    const Rational mag = v.sign() < 0 ? -v : v;
    const Rational cur = slot.value.sign() < 0 ? -slot.value : slot.value;
    if (!slot.set || mag < cur) {
        slot = ExtremalValue{name, n, a, b, v, true};
    }
}

void require_sign(ShardResult& out, const std::string& name, int64_t n, int64_t a, int64_t b,
                  const Rational& v, int sign) {
    out.checks++;
    out.sign_checks[name]++;
    track_extremal(out.extremal, name, n, a, b, v);
    if (sign > 0 ? v.sign() < 0 : v.sign() > 0)
        out.violations.push_back({name, n, a, b, v.to_string()});
}

void require_equal(ShardResult& out, const std::string& what, int64_t n, int64_t a, int64_t b,
                   const Rational& x, const Rational& y) {
    out.checks++;
    if (x != y && out.identities_ok) {
        out.identities_ok = false;
        std::ostringstream os;
        os << what << " at (n,a,b)=(" << n << "," << a << "," << b << "): " << x.to_string()
           << " vs " << y.to_string();
        out.first_identity_failure = os.str();
    }
}

// all checks for one value of n (plus the n-independent lambda grid at n == 0)
void sweep_one_n(int64_t n, int64_t n_max, ShardResult& out) {
    for (int64_t a = 0; a <= n; ++a) {
        for (int64_t b = 0; a + b <= n; ++b) {
            const Rational d2 = delta2(n, a, b);
            const Rational d1 = delta1(n, a, b);
            const Rational sg = big_sigma(n, a, b);
            require_sign(out, "delta2", n, a, b, d2, +1);
            require_sign(out, "delta1", n, a, b, d1, -1);
            require_sign(out, "big_sigma", n, a, b, sg, +1);
            if (n >= 1) {
                const Rational ps = psi(n, a, b);
                require_sign(out, "psi", n, a, b, ps, +1);
                require_equal(out, "psi = big_sigma/n", n, a, b, ps, sg / Rational(n));
            }
            if (a + b <= n - 1) {
                // difference identities step n -> n+1 inside the grid
                require_equal(out, "delta1(n+1)-delta1(n) = delta2(n)", n, a, b,
                              delta1(n + 1, a, b) - d1, d2);
                require_equal(out, "big_sigma(n+1)-big_sigma(n) = delta1(n)", n, a, b,
                              big_sigma(n + 1, a, b) - sg, d1);
            }
        }
    }
    if (n == 0) {
        for (int64_t a = 0; a <= n_max; ++a) {
            for (int64_t b = 0; b <= n_max; ++b) {
                const Rational l1 = lambda1(a, b);
                const Rational lm = lambda(a, b);
                require_sign(out, "lambda1", a + b, a, b, l1, -1);
                require_sign(out, "lambda", a + b, a, b, lm, +1);
                require_equal(out, "lambda1 = delta1(b+2a,a,b)", b + 2 * a, a, b, l1,
                              delta1(b + 2 * a, a, b));
                require_equal(out, "lambda(a+1)-lambda(a) = lambda1(a)", a, a, b,
                              lambda(a + 1, b) - lm, l1);
            }
        }
    }
}

}  // namespace

SweepReport sweep_signs(int64_t n_max, unsigned jobs) {
    if (n_max < 1) throw std::invalid_argument("sweep_signs: n_max must be >= 1");
    // pre-grow shared caches so shards only read
    exact::kappa(size_t(2 * n_max + 2));
    harmonics().reserve(size_t(3 * n_max + 2));
    for (int64_t b = 0; b <= n_max; ++b) core_terms(b);

    const unsigned nshards = std::max(1u, jobs);
    std::vector<ShardResult> shards(nshards);
    auto work = [&](unsigned shard) {
        for (int64_t n = int64_t(shard); n <= n_max; n += nshards)
            sweep_one_n(n, n_max, shards[shard]);
    };
    if (nshards == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned s = 0; s < nshards; ++s) threads.emplace_back(work, s);
        for (auto& th : threads) th.join();
    }

    SweepReport report;
    report.n_max = n_max;
    std::map<std::string, ExtremalValue> extremal;
    std::map<std::string, uint64_t> by_quantity;
    for (auto& sh : shards) {
        report.checks += sh.checks;
        for (auto& [name, cnt] : sh.sign_checks) by_quantity[name] += cnt;
        report.violations.insert(report.violations.end(), sh.violations.begin(),
                                 sh.violations.end());
        if (!sh.identities_ok && report.identities_ok) {
            report.identities_ok = false;
            report.first_identity_failure = sh.first_identity_failure;
        }
        for (auto& [name, ext] : sh.extremal) {
            if (!ext.set) continue;
            auto& slot = extremal[name];
            const Rational mag = ext.value.sign() < 0 ? -ext.value : ext.value;
            const Rational cur = slot.value.sign() < 0 ? -slot.value : slot.value;
            if (!slot.set || mag < cur) slot = ext;
        }
    }
    for (auto& [name, ext] : extremal) report.extremal.push_back(ext);
    for (auto& [name, cnt] : by_quantity) report.checks_by_quantity.emplace_back(name, cnt);
    return report;
}

std::string SweepReport::to_json() const {
    nlohmann::json j;
    j["n_max"] = n_max;
    j["checks"] = checks;
    j["sign_checks"] = nlohmann::json::object();
    for (const auto& [name, cnt] : checks_by_quantity) j["sign_checks"][name] = cnt;
    j["passed"] = passed();
    j["identities_ok"] = identities_ok;
    if (!identities_ok) j["first_identity_failure"] = first_identity_failure;
    j["violations"] = nlohmann::json::array();
    for (const auto& v : violations)
        j["violations"].push_back({{"quantity", v.quantity},
                                   {"n", v.n},
                                   {"a", v.a},
                                   {"b", v.b},
                                   {"value", v.value}});
    j["extremal"] = nlohmann::json::array();
    for (const auto& e : extremal)
        j["extremal"].push_back({{"quantity", e.quantity},
                                 {"n", e.n},
                                 {"a", e.a},
                                 {"b", e.b},
                                 {"value", e.value.to_string()}});
    return j.dump(2);
}

}  // namespace qsc::lemmas
