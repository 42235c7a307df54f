#include "qsc/sorter.hpp"

#include <algorithm>
#include <stdexcept>

namespace qsc {

void PrefixTrie::credit(const std::vector<uint32_t>& symbols, uint32_t diff_index) {
    Node* cur = &root_;
    for (uint32_t depth = 0; depth < diff_index; ++depth) {
        cur->count++;
        if (depth + 1 == diff_index) break;
        if (cur->kids.empty()) cur->kids.resize(fanout_);
        auto& kid = cur->kids[symbols[depth]];
        if (!kid) kid = std::make_unique<Node>();
        cur = kid.get();
    }
    if (diff_index > max_depth_ + 1) max_depth_ = diff_index - 1;
}

uint64_t PrefixTrie::count(const Prefix& w) const {
    const Node* cur = &root_;
    for (size_t i = 0; i < w.size(); ++i) {
        if (cur->kids.empty() || !cur->kids[w[i]]) return 0;
        cur = cur->kids[w[i]].get();
    }
    return cur->count;
}

uint64_t PrefixTrie::total() const {
    uint64_t sum = 0;
    for (uint64_t level : level_sums()) sum += level;
    return sum;
}

std::vector<uint64_t> PrefixTrie::level_sums() const {
    std::vector<uint64_t> sums(max_depth_ + 1, 0);
    struct Frame {
        const Node* node;
        size_t depth;
    };
    std::vector<Frame> stack{{&root_, 0}};
    while (!stack.empty()) {
        auto [node, depth] = stack.back();
        stack.pop_back();
        if (depth < sums.size()) sums[depth] += node->count;
        for (const auto& kid : node->kids)
            if (kid) stack.push_back({kid.get(), depth + 1});
    }
    return sums;
}

std::vector<uint64_t> PrefixTrie::breadth_first(size_t depth) const {
    size_t slots = 0, level_size = 1;
    for (size_t k = 0; k <= depth; ++k) {
        slots += level_size;
        level_size *= fanout_;
    }
    std::vector<uint64_t> out(slots, 0);
    // slot of a node = slot(parent level base) + path index
    struct Frame {
        const Node* node;
        size_t level;
        size_t path;
    };
    std::vector<size_t> level_base(depth + 2, 0);
    level_size = 1;
    for (size_t k = 0; k <= depth; ++k) {
        level_base[k + 1] = level_base[k] + level_size;
        level_size *= fanout_;
    }
    std::vector<Frame> stack{{&root_, 0, 0}};
    while (!stack.empty()) {
        auto [node, level, path] = stack.back();
        stack.pop_back();
        out[level_base[level] + path] = node->count;
        if (level == depth) continue;
        for (size_t s = 0; s < node->kids.size(); ++s)
            if (node->kids[s])
                stack.push_back({node->kids[s].get(), level + 1, path * fanout_ + s});
    }
    return out;
}

SortResult quicksort_instrumented(std::vector<Key>& keys, uint32_t depth_cap) {
    const size_t alphabet = keys.empty() ? 2 : keys[0].source().alphabet_size();
    SortResult result{Tally{keys.size(), 0, 0, PrefixTrie(alphabet)}, {}};
    result.sorted_order.reserve(keys.size());

    // explicit stack of sublists in arrival order; partition is stable, so
    // each side's first element is its first-arriving key. Sorted order is
    // emitted as sort(less), pivot, sort(greater) via sentinel frames.
    std::vector<uint32_t> all(keys.size());
    for (uint32_t i = 0; i < keys.size(); ++i) all[i] = i;
    struct Frame {
        std::vector<uint32_t> items;
        int32_t pivot = -1;  // >= 0: emit this index
    };
    std::vector<Frame> frames;
    frames.push_back({std::move(all), -1});
    auto& tally = result.tally;
    while (!frames.empty()) {
        Frame fr = std::move(frames.back());
        frames.pop_back();
        if (fr.pivot >= 0) {
            result.sorted_order.push_back(uint32_t(fr.pivot));
            continue;
        }
        if (fr.items.empty()) continue;
        if (fr.items.size() == 1) {
            result.sorted_order.push_back(fr.items[0]);
            continue;
        }
        const uint32_t pivot = fr.items[0];
        std::vector<uint32_t> less, greater;
        for (size_t i = 1; i < fr.items.size(); ++i) {
            const uint32_t other = fr.items[i];
            const CompareOutcome out = compare_counted(keys[pivot], keys[other], depth_cap);
            tally.key_comparisons++;
            tally.total_symbol_comparisons += out.first_diff_index;
            tally.prefix_counts.credit(keys[pivot].buffer(), out.first_diff_index);
            // out.ordering compares pivot against other
            if (out.ordering == CompareOutcome::Order::greater)
                less.push_back(other);
            else
                greater.push_back(other);
        }
        frames.push_back({std::move(greater), -1});
        frames.push_back({{}, int32_t(pivot)});
        frames.push_back({std::move(less), -1});
    }
    return result;
}

namespace {
void check_permutation(const std::vector<uint32_t>& perm) {
    std::vector<bool> seen(perm.size() + 1, false);
    for (uint32_t r : perm) {
        if (r < 1 || r > perm.size() || seen[r])
            throw std::invalid_argument("quicksort_ranks: not a permutation of 1..n");
        seen[r] = true;
    }
}
}  // namespace

uint64_t quicksort_ranks(const std::vector<uint32_t>& perm) {
    return quicksort_ranks_grouped(perm, 0, 0).key_comparisons;
}

GroupedCounts quicksort_ranks_grouped(const std::vector<uint32_t>& perm, uint32_t a, uint32_t b) {
    check_permutation(perm);
    if (uint64_t(a) + b > perm.size())
        throw std::invalid_argument("quicksort_ranks_grouped: a + b exceeds n");
    GroupedCounts counts;
    const auto in_group = [a, b](uint32_t r) { return r > a && r <= a + b; };
    std::vector<std::vector<uint32_t>> stack;
    stack.push_back(perm);
    while (!stack.empty()) {
        std::vector<uint32_t> sub = std::move(stack.back());
        stack.pop_back();
        if (sub.size() <= 1) continue;
        const uint32_t pivot = sub[0];
        std::vector<uint32_t> less, greater;
        const bool pivot_in = in_group(pivot);
        for (size_t i = 1; i < sub.size(); ++i) {
            counts.key_comparisons++;
            if (pivot_in && in_group(sub[i])) counts.group_comparisons++;
            (sub[i] < pivot ? less : greater).push_back(sub[i]);
        }
        stack.push_back(std::move(less));
        stack.push_back(std::move(greater));
    }
    return counts;
}

}  // namespace qsc
