#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsc/rational.hpp"

namespace qsc {

// Totally ordered finite alphabet; the index in the symbol list is the order.
class Alphabet {
  public:
    explicit Alphabet(std::vector<std::string> symbols);
    static Alphabet indexed(size_t size);  // symbols "0", "1", ...

    size_t size() const { return symbols_.size(); }
    const std::string& symbol(size_t i) const { return symbols_[i]; }
    std::optional<uint32_t> index_of(std::string_view name) const;
    bool single_char_symbols() const;

    friend bool operator==(const Alphabet& a, const Alphabet& b) {
        return a.symbols_ == b.symbols_;
    }

  private:
    std::vector<std::string> symbols_;
};

// Finite (possibly empty) word over an alphabet, stored as symbol indices.
class Prefix {
  public:
    Prefix() = default;
    explicit Prefix(std::vector<uint32_t> symbols) : symbols_(std::move(symbols)) {}

    // accepts "011" when all symbol names are single characters, else "0,1,1"
    static Prefix parse(std::string_view text, const Alphabet& alphabet);

    size_t size() const { return symbols_.size(); }
    bool empty() const { return symbols_.empty(); }
    uint32_t operator[](size_t i) const { return symbols_[i]; }
    const std::vector<uint32_t>& symbols() const { return symbols_; }

    void append(uint32_t symbol) { symbols_.push_back(symbol); }
    Prefix concat(const Prefix& tail) const;
    std::string to_string(const Alphabet& alphabet) const;

    friend bool operator==(const Prefix& a, const Prefix& b) {
        return a.symbols_ == b.symbols_;
    }
    friend bool operator<(const Prefix& a, const Prefix& b) {
        return a.symbols_ < b.symbols_;
    }

  private:
    std::vector<uint32_t> symbols_;
};

// Probabilistic source over infinite words: memoryless or Markov. Immutable
// after construction. Probabilities are kept as doubles for sampling plus,
// when constructed from rationals, exactly for the invariant checks.
// Construction rejects atomic sources (a reachable symbol probability of 1):
// those would make key comparison non-terminating.
class SourceModel {
  public:
    enum class Kind { memoryless, markov };

    static SourceModel memoryless(Alphabet alphabet, std::vector<double> probs);
    static SourceModel memoryless_exact(Alphabet alphabet, std::vector<Rational> probs);
    static SourceModel markov(Alphabet alphabet, std::vector<double> initial,
                              std::vector<std::vector<double>> transition);
    static SourceModel markov_exact(Alphabet alphabet, std::vector<Rational> initial,
                                    std::vector<std::vector<Rational>> transition);

    Kind kind() const { return kind_; }
    bool exact() const { return exact_; }
    const Alphabet& alphabet() const { return alphabet_; }
    size_t alphabet_size() const { return alphabet_.size(); }

    // p_w = P(key starts with w)
    double prefix_prob(const Prefix& w) const;
    Rational prefix_prob_exact(const Prefix& w) const;

    // total mass of length-|w| prefixes strictly below w in lexicographic order
    double prefix_prob_less(const Prefix& w) const;
    Rational prefix_prob_less_exact(const Prefix& w) const;

    // sum_{k=0}^{depth} (sum_{w in Sigma^k} p_w^2)^{1/2}
    double condition_partial_sum(size_t depth) const;

    // source of the suffix after w, given the word starts with w
    SourceModel conditioned(const Prefix& w) const;

    // sup over reachable states of sum of squared next-symbol probabilities;
    // < 1 for every source this class accepts
    double sq_mass_decay() const;

    const std::vector<double>& first_dist() const { return first_; }
    const std::vector<double>& next_dist(uint32_t prev) const {
        return kind_ == Kind::memoryless ? first_ : trans_[prev];
    }

    uint32_t sample_first(double u) const { return pick(first_cdf_, u); }
    uint32_t sample_next(uint32_t prev, double u) const {
        return kind_ == Kind::memoryless ? pick(first_cdf_, u) : pick(trans_cdf_[prev], u);
    }

    std::string describe() const;

    // round-trippable JSON: memoryless {"kind","probs"} or the markov layout
    // {"alphabet","initial","transition"}; exact entries as "num/den" strings
    std::string to_json_text() const;

  private:
    SourceModel(Kind kind, Alphabet alphabet);
    void finalize();
    void validate() const;
    std::vector<bool> reachable_states() const;
    static uint32_t pick(const std::vector<double>& cdf, double u);

    Kind kind_;
    Alphabet alphabet_;
    std::vector<double> first_;
    std::vector<std::vector<double>> trans_;
    bool exact_ = false;
    std::vector<Rational> first_x_;
    std::vector<std::vector<Rational>> trans_x_;
    std::vector<double> first_cdf_;
    std::vector<std::vector<double>> trans_cdf_;
};

// "memoryless:p1,p2,..." or "markov:<path to json>"; entries may be decimal
// literals or "a/b" fractions, both of which produce an exact-mode source.
SourceModel parse_source_spec(const std::string& spec);

// JSON object with keys "alphabet", "initial", "transition"
SourceModel source_from_json_text(const std::string& json_text);

}  // namespace qsc
