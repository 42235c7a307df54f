#include "qsc/source.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qsc/errors.hpp"

namespace qsc {

namespace {
constexpr double kSumTol = 1e-12;

double checked_sum(const std::vector<double>& v, const char* what) {
    double s = 0;
    for (double p : v) {
        if (!(p >= 0.0) || p > 1.0) throw std::invalid_argument(std::string(what) + ": probability outside [0,1]");
        s += p;
    }
    if (std::abs(s - 1.0) > kSumTol)
        throw std::invalid_argument(std::string(what) + ": probabilities do not sum to 1");
    return s;
}

void checked_sum_exact(const std::vector<Rational>& v, const char* what) {
    Rational s;
    for (const auto& p : v) {
        if (p.sign() < 0 || p > Rational(1))
            throw std::invalid_argument(std::string(what) + ": probability outside [0,1]");
        s += p;
    }
    if (s != Rational(1))
        throw std::invalid_argument(std::string(what) + ": probabilities do not sum to 1 exactly");
}

std::vector<double> to_doubles(const std::vector<Rational>& v) {
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i].to_double();
    return out;
}
}  // namespace

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.size() < 2) throw std::invalid_argument("Alphabet: need at least 2 symbols");
    std::set<std::string> seen(symbols_.begin(), symbols_.end());
    if (seen.size() != symbols_.size())
        throw std::invalid_argument("Alphabet: duplicate symbols");
}

Alphabet Alphabet::indexed(size_t size) {
    std::vector<std::string> syms;
    syms.reserve(size);
    for (size_t i = 0; i < size; ++i) syms.push_back(std::to_string(i));
    return Alphabet(std::move(syms));
}

std::optional<uint32_t> Alphabet::index_of(std::string_view name) const {
    for (size_t i = 0; i < symbols_.size(); ++i)
        if (symbols_[i] == name) return uint32_t(i);
    return std::nullopt;
}

bool Alphabet::single_char_symbols() const {
    return std::all_of(symbols_.begin(), symbols_.end(),
                       [](const std::string& s) { return s.size() == 1; });
}

Prefix Prefix::parse(std::string_view text, const Alphabet& alphabet) {
    Prefix w;
    if (text.empty()) return w;
    if (text.find(',') == std::string_view::npos && alphabet.single_char_symbols()) {
        for (char c : text) {
            auto idx = alphabet.index_of(std::string_view(&c, 1));
            if (!idx) throw InvalidPrefix("prefix symbol '" + std::string(1, c) + "' not in alphabet");
            w.append(*idx);
        }
        return w;
    }
    std::string token;
    std::stringstream ss{std::string(text)};
    while (std::getline(ss, token, ',')) {
        auto idx = alphabet.index_of(token);
        if (!idx) throw InvalidPrefix("prefix symbol '" + token + "' not in alphabet");
        w.append(*idx);
    }
    return w;
}

Prefix Prefix::concat(const Prefix& tail) const {
    Prefix w = *this;
    w.symbols_.insert(w.symbols_.end(), tail.symbols_.begin(), tail.symbols_.end());
    return w;
}

std::string Prefix::to_string(const Alphabet& alphabet) const {
    std::string out;
    const bool chars = alphabet.single_char_symbols();
    for (size_t i = 0; i < symbols_.size(); ++i) {
        if (!chars && i) out += ',';
        out += alphabet.symbol(symbols_[i]);
    }
    return out;
}

SourceModel::SourceModel(Kind kind, Alphabet alphabet)
    : kind_(kind), alphabet_(std::move(alphabet)) {}

SourceModel SourceModel::memoryless(Alphabet alphabet, std::vector<double> probs) {
    SourceModel m(Kind::memoryless, std::move(alphabet));
    m.first_ = std::move(probs);
    m.finalize();
    return m;
}

SourceModel SourceModel::memoryless_exact(Alphabet alphabet, std::vector<Rational> probs) {
    SourceModel m(Kind::memoryless, std::move(alphabet));
    checked_sum_exact(probs, "memoryless");
    m.first_ = to_doubles(probs);
    m.first_x_ = std::move(probs);
    m.exact_ = true;
    m.finalize();
    return m;
}

SourceModel SourceModel::markov(Alphabet alphabet, std::vector<double> initial,
                                std::vector<std::vector<double>> transition) {
    SourceModel m(Kind::markov, std::move(alphabet));
    m.first_ = std::move(initial);
    m.trans_ = std::move(transition);
    m.finalize();
    return m;
}

SourceModel SourceModel::markov_exact(Alphabet alphabet, std::vector<Rational> initial,
                                      std::vector<std::vector<Rational>> transition) {
    SourceModel m(Kind::markov, std::move(alphabet));
    checked_sum_exact(initial, "markov initial");
    for (const auto& row : transition) checked_sum_exact(row, "markov transition row");
    m.first_ = to_doubles(initial);
    m.trans_.reserve(transition.size());
    for (const auto& row : transition) m.trans_.push_back(to_doubles(row));
    m.first_x_ = std::move(initial);
    m.trans_x_ = std::move(transition);
    m.exact_ = true;
    m.finalize();
    return m;
}

void SourceModel::finalize() {
    validate();
    auto make_cdf = [](const std::vector<double>& p) {
        std::vector<double> cdf(p.size());
        double acc = 0;
        for (size_t i = 0; i < p.size(); ++i) {
            acc += p[i];
            cdf[i] = acc;
        }
        cdf.back() = 1.0;
        return cdf;
    };
    first_cdf_ = make_cdf(first_);
    trans_cdf_.clear();
    for (const auto& row : trans_) trans_cdf_.push_back(make_cdf(row));
}

std::vector<bool> SourceModel::reachable_states() const {
    const size_t m = alphabet_.size();
    std::vector<bool> reach(m, false);
    std::vector<uint32_t> work;
    for (size_t s = 0; s < m; ++s) {
        if (first_[s] > 0) {
            reach[s] = true;
            work.push_back(uint32_t(s));
        }
    }
    while (!work.empty()) {
        uint32_t s = work.back();
        work.pop_back();
        for (size_t s2 = 0; s2 < m; ++s2) {
            if (trans_[s][s2] > 0 && !reach[s2]) {
                reach[s2] = true;
                work.push_back(uint32_t(s2));
            }
        }
    }
    return reach;
}

void SourceModel::validate() const {
    const size_t m = alphabet_.size();
    if (first_.size() != m)
        throw std::invalid_argument("source: distribution size does not match alphabet");
    checked_sum(first_, kind_ == Kind::memoryless ? "memoryless" : "markov initial");
    auto atom = [](double p) { return p >= 1.0 - kSumTol; };
    if (kind_ == Kind::memoryless) {
        for (double p : first_)
            if (atom(p)) throw std::invalid_argument("source: atomic (symbol probability 1)");
        return;
    }
    if (trans_.size() != m)
        throw std::invalid_argument("markov: transition matrix size does not match alphabet");
    for (const auto& row : trans_) {
        if (row.size() != m) throw std::invalid_argument("markov: ragged transition row");
        checked_sum(row, "markov transition row");
    }
    for (double p : first_)
        if (atom(p)) throw std::invalid_argument("source: atomic initial distribution");
    const auto reach = reachable_states();
    for (size_t s = 0; s < m; ++s) {
        if (!reach[s]) continue;
        for (double p : trans_[s])
            if (atom(p))
                throw std::invalid_argument("source: atomic transition row (reachable state " +
                                            alphabet_.symbol(s) + ")");
    }
}

double SourceModel::prefix_prob(const Prefix& w) const {
    double p = 1.0;
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] >= alphabet_.size()) throw InvalidPrefix("prefix symbol outside alphabet");
        p *= (i == 0 ? first_[w[i]] : next_dist(w[i - 1])[w[i]]);
    }
    return p;
}

Rational SourceModel::prefix_prob_exact(const Prefix& w) const {
    if (!exact_) throw std::logic_error("source: exact probabilities unavailable (float model)");
    Rational p(1);
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] >= alphabet_.size()) throw InvalidPrefix("prefix symbol outside alphabet");
        const auto& row = (kind_ == Kind::memoryless || i == 0) ? first_x_ : trans_x_[w[i - 1]];
        p *= row[w[i]];
    }
    return p;
}

double SourceModel::prefix_prob_less(const Prefix& w) const {
    // walk the trie spine: mass of branches leaving below w at each depth
    double below = 0.0;
    double on_path = 1.0;
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] >= alphabet_.size()) throw InvalidPrefix("prefix symbol outside alphabet");
        const auto& dist = (i == 0) ? first_ : next_dist(w[i - 1]);
        for (uint32_t s = 0; s < w[i]; ++s) below += on_path * dist[s];
        on_path *= dist[w[i]];
    }
    return below;
}

Rational SourceModel::prefix_prob_less_exact(const Prefix& w) const {
    if (!exact_) throw std::logic_error("source: exact probabilities unavailable (float model)");
    Rational below;
    Rational on_path(1);
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] >= alphabet_.size()) throw InvalidPrefix("prefix symbol outside alphabet");
        const auto& dist = (kind_ == Kind::memoryless || i == 0) ? first_x_ : trans_x_[w[i - 1]];
        for (uint32_t s = 0; s < w[i]; ++s) below += on_path * dist[s];
        on_path *= dist[w[i]];
    }
    return below;
}

double SourceModel::condition_partial_sum(size_t depth) const {
    double total = 1.0;  // k = 0: only the empty prefix, p = 1
    if (kind_ == Kind::memoryless) {
        double q = 0.0;
        for (double p : first_) q += p * p;
        for (size_t k = 1; k <= depth; ++k) total += std::pow(q, 0.5 * double(k));
        return total;
    }
    // level-by-level squared path masses, keyed by last symbol
    const size_t m = alphabet_.size();
    std::vector<double> sq(m);
    for (size_t s = 0; s < m; ++s) sq[s] = first_[s] * first_[s];
    for (size_t k = 1; k <= depth; ++k) {
        double level = 0.0;
        for (double v : sq) level += v;
        total += std::sqrt(level);
        if (k == depth) break;
        std::vector<double> next(m, 0.0);
        for (size_t s = 0; s < m; ++s) {
            if (sq[s] == 0.0) continue;
            for (size_t s2 = 0; s2 < m; ++s2) next[s2] += sq[s] * trans_[s][s2] * trans_[s][s2];
        }
        sq = std::move(next);
    }
    return total;
}

SourceModel SourceModel::conditioned(const Prefix& w) const {
    if (prefix_prob(w) <= 0.0)
        throw ConditioningOnNull("conditioned_source: prefix has probability 0");
    if (kind_ == Kind::memoryless || w.empty()) return *this;
    const uint32_t last = w[w.size() - 1];
    if (exact_) return markov_exact(alphabet_, trans_x_[last], trans_x_);
    return markov(alphabet_, trans_[last], trans_);
}

double SourceModel::sq_mass_decay() const {
    if (kind_ == Kind::memoryless) {
        double q = 0.0;
        for (double p : first_) q += p * p;
        return q;
    }
    const auto reach = reachable_states();
    double q = 0.0;
    for (size_t s = 0; s < alphabet_.size(); ++s) {
        if (!reach[s]) continue;
        double row = 0.0;
        for (double p : trans_[s]) row += p * p;
        q = std::max(q, row);
    }
    return q;
}

uint32_t SourceModel::pick(const std::vector<double>& cdf, double u) {
    // u in [0,1); first index with u < cdf[i]
    return uint32_t(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

std::string SourceModel::describe() const {
    std::ostringstream os;
    os << (kind_ == Kind::memoryless ? "memoryless" : "markov") << "[m=" << alphabet_.size()
       << (exact_ ? ",exact" : "") << "]";
    return os.str();
}

namespace {

bool parse_rational_token(const std::string& tok, Rational& out) {
    auto slash = tok.find('/');
    try {
        if (slash != std::string::npos) {
            BigInt num = BigInt::from_decimal(tok.substr(0, slash));
            BigInt den = BigInt::from_decimal(tok.substr(slash + 1));
            out = Rational(std::move(num), std::move(den));
            return true;
        }
        auto dot = tok.find('.');
        if (dot == std::string::npos) {
            out = Rational(BigInt::from_decimal(tok), BigInt(1));
            return true;
        }
        std::string digits = tok.substr(0, dot) + tok.substr(dot + 1);
        const size_t frac_digits = tok.size() - dot - 1;
        BigInt den(1);
        for (size_t i = 0; i < frac_digits; ++i) den *= BigInt(10);
        out = Rational(BigInt::from_decimal(digits.empty() ? "0" : digits), std::move(den));
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<Rational> parse_rational_list(const std::string& text) {
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        Rational r;
        if (!parse_rational_token(tok, r))
            throw std::invalid_argument("source spec: bad probability '" + tok + "'");
        out.push_back(std::move(r));
    }
    return out;
}

Rational json_entry_to_rational(const nlohmann::json& v, bool& exact) {
    if (v.is_string()) {
        Rational r;
        if (!parse_rational_token(v.get<std::string>(), r))
            throw std::invalid_argument("source json: bad probability string");
        return r;
    }
    if (v.is_number_integer()) return Rational(v.get<int64_t>());
    exact = false;
    return Rational();
}

}  // namespace

std::string SourceModel::to_json_text() const {
    nlohmann::json j;
    auto encode = [this](size_t row, size_t i) -> nlohmann::json {
        if (exact_) {
            const Rational& r = row == 0 ? first_x_[i] : trans_x_[row - 1][i];
            return r.to_string();
        }
        return row == 0 ? first_[i] : trans_[row - 1][i];
    };
    const size_t m = alphabet_.size();
    if (kind_ == Kind::memoryless) {
        j["kind"] = "memoryless";
        auto probs = nlohmann::json::array();
        for (size_t i = 0; i < m; ++i) probs.push_back(encode(0, i));
        j["probs"] = probs;
        auto alpha = nlohmann::json::array();
        for (size_t i = 0; i < m; ++i) alpha.push_back(alphabet_.symbol(i));
        j["alphabet"] = alpha;
        return j.dump();
    }
    j["kind"] = "markov";
    auto alpha = nlohmann::json::array();
    for (size_t i = 0; i < m; ++i) alpha.push_back(alphabet_.symbol(i));
    j["alphabet"] = alpha;
    auto init = nlohmann::json::array();
    for (size_t i = 0; i < m; ++i) init.push_back(encode(0, i));
    j["initial"] = init;
    auto trans = nlohmann::json::array();
    for (size_t r = 0; r < m; ++r) {
        auto row = nlohmann::json::array();
        for (size_t i = 0; i < m; ++i) row.push_back(encode(r + 1, i));
        trans.push_back(row);
    }
    j["transition"] = trans;
    return j.dump();
}

SourceModel source_from_json_text(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    if (j.contains("kind") && j["kind"] == "memoryless") {
        Alphabet alpha = j.contains("alphabet")
                             ? Alphabet([&] {
                                   std::vector<std::string> s;
                                   for (const auto& v : j["alphabet"]) s.push_back(v.get<std::string>());
                                   return s;
                               }())
                             : Alphabet::indexed(j.at("probs").size());
        bool exact = true;
        for (const auto& v : j.at("probs")) {
            bool e = true;
            json_entry_to_rational(v, e);
            exact = exact && e;
        }
        if (exact) {
            std::vector<Rational> probs;
            bool dummy = true;
            for (const auto& v : j["probs"]) probs.push_back(json_entry_to_rational(v, dummy));
            return SourceModel::memoryless_exact(std::move(alpha), std::move(probs));
        }
        std::vector<double> probs;
        for (const auto& v : j["probs"]) probs.push_back(v.get<double>());
        return SourceModel::memoryless(std::move(alpha), std::move(probs));
    }
    std::vector<std::string> syms;
    for (const auto& s : j.at("alphabet")) syms.push_back(s.get<std::string>());
    Alphabet alpha(std::move(syms));
    const auto& init = j.at("initial");
    const auto& trans = j.at("transition");

    bool exact = true;
    auto probe = [&exact](const nlohmann::json& v) {
        bool e = true;
        json_entry_to_rational(v, e);
        exact = exact && e;
    };
    for (const auto& v : init) probe(v);
    for (const auto& row : trans)
        for (const auto& v : row) probe(v);

    if (exact) {
        std::vector<Rational> ix;
        bool dummy = true;
        for (const auto& v : init) ix.push_back(json_entry_to_rational(v, dummy));
        std::vector<std::vector<Rational>> tx;
        for (const auto& row : trans) {
            std::vector<Rational> r;
            for (const auto& v : row) r.push_back(json_entry_to_rational(v, dummy));
            tx.push_back(std::move(r));
        }
        return SourceModel::markov_exact(std::move(alpha), std::move(ix), std::move(tx));
    }
    std::vector<double> id;
    for (const auto& v : init) id.push_back(v.get<double>());
    std::vector<std::vector<double>> td;
    for (const auto& row : trans) {
        std::vector<double> r;
        for (const auto& v : row) r.push_back(v.get<double>());
        td.push_back(std::move(r));
    }
    return SourceModel::markov(std::move(alpha), std::move(id), std::move(td));
}

SourceModel parse_source_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("source spec: expected 'memoryless:...' or 'markov:<path>'");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (kind == "memoryless") {
        auto probs = parse_rational_list(rest);
        const size_t m = probs.size();
        return SourceModel::memoryless_exact(Alphabet::indexed(m), std::move(probs));
    }
    if (kind == "markov") {
        std::ifstream in(rest);
        if (!in) throw std::invalid_argument("source spec: cannot open markov file '" + rest + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return source_from_json_text(buf.str());
    }
    throw std::invalid_argument("source spec: unknown kind '" + kind + "'");
}

}  // namespace qsc
