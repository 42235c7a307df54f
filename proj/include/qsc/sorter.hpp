#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "qsc/keys.hpp"
#include "qsc/source.hpp"

namespace qsc {

// Sparse trie of per-prefix symbol-comparison counts. A comparison whose
// first difference is at (1-based) index d credits the common prefixes of
// lengths 0..d-1, one count each, so the counts at a fixed level partition
// that level's comparisons disjointly.
class PrefixTrie {
  public:
    explicit PrefixTrie(size_t alphabet_size) : fanout_(alphabet_size) {}

    void credit(const std::vector<uint32_t>& symbols, uint32_t diff_index);
    uint64_t count(const Prefix& w) const;
    size_t max_depth() const { return max_depth_; }
    uint64_t total() const;
    std::vector<uint64_t> level_sums() const;  // indices 0..max_depth
    // dense counts for all prefixes of length <= depth, breadth first,
    // symbols in alphabet order (the frozen CSV column order)
    std::vector<uint64_t> breadth_first(size_t depth) const;

  private:
    struct Node {
        uint64_t count = 0;
        std::vector<std::unique_ptr<Node>> kids;
    };
    Node root_;
    size_t fanout_;
    size_t max_depth_ = 0;
};

struct Tally {
    uint64_t n = 0;
    uint64_t key_comparisons = 0;
    uint64_t total_symbol_comparisons = 0;
    PrefixTrie prefix_counts;
};

// Keys in arrival order (index 0 arrived first), all drawn from one source
// under one master seed. Arrival order is the randomness the pivot rule sees.
struct ArrivalSequence {
    std::vector<Key> keys;

    static ArrivalSequence generate(const SourceModel& source, uint64_t master_seed, size_t n) {
        ArrivalSequence seq;
        seq.keys.reserve(n);
        for (size_t i = 0; i < n; ++i) seq.keys.push_back(generate_key(source, master_seed, i));
        return seq;
    }
};

// QuickSort with the first-arrival pivot rule: the pivot of every sublist is
// its earliest-arriving key, which stable partitioning preserves recursively.
// Returns the instrumented counts; key order inside `keys` is not changed,
// the sorted order is returned as indices into it.
struct SortResult {
    Tally tally;
    std::vector<uint32_t> sorted_order;  // arrival indices in ascending key order
};
SortResult quicksort_instrumented(std::vector<Key>& keys, uint32_t depth_cap = kDefaultDepthCap);
inline SortResult quicksort_instrumented(ArrivalSequence& seq,
                                         uint32_t depth_cap = kDefaultDepthCap) {
    return quicksort_instrumented(seq.keys, depth_cap);
}

// Rank-only oracle: the key-comparison count depends on arrival ranks alone.
uint64_t quicksort_ranks(const std::vector<uint32_t>& perm);

// Additionally counts comparisons where both ranks lie in (a, a+b]: the
// conditional group model with a keys below the block and b inside it.
struct GroupedCounts {
    uint64_t key_comparisons = 0;
    uint64_t group_comparisons = 0;
};
GroupedCounts quicksort_ranks_grouped(const std::vector<uint32_t>& perm, uint32_t a, uint32_t b);

}  // namespace qsc
