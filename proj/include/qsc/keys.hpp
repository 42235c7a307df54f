#pragma once

#include <cstdint>
#include <vector>

#include "qsc/rng.hpp"
#include "qsc/source.hpp"

namespace qsc {

// A key is an infinite random word, generated lazily. The symbol stream is
// counter-based, so regenerating from the same (master seed, arrival index)
// reproduces the identical word regardless of how far or in what order it
// was previously extended. Not safe to extend one Key from two threads.
class Key {
  public:
    Key(const SourceModel* source, uint64_t stream_seed)
        : source_(source), stream_(stream_seed) {}

    uint32_t symbol(size_t i) {
        while (buffer_.size() <= i) extend();
        return buffer_[i];
    }

    size_t generated() const { return buffer_.size(); }
    const std::vector<uint32_t>& buffer() const { return buffer_; }
    const SourceModel& source() const { return *source_; }

  private:
    void extend() {
        const double u = stream_.unit_at(buffer_.size());
        const uint32_t s = buffer_.empty() ? source_->sample_first(u)
                                           : source_->sample_next(buffer_.back(), u);
        buffer_.push_back(s);
    }

    const SourceModel* source_;
    RandomStream stream_;
    std::vector<uint32_t> buffer_;
};

struct CompareOutcome {
    enum class Order { less, greater };
    Order ordering;                // first key relative to second
    uint32_t first_diff_index;     // 1-based; equals symbol comparisons spent
};

inline constexpr uint32_t kDefaultDepthCap = 64;

Key generate_key(const SourceModel& source, uint64_t master_seed, uint64_t arrival_index);

// Scan matching-index symbols left to right until they differ, extending
// both keys as needed. The caller owes one symbol-comparison credit to each
// common prefix of length 0 .. first_diff_index-1. Throws DepthCapExceeded
// when the keys agree through depth_cap symbols.
CompareOutcome compare_counted(Key& k1, Key& k2, uint32_t depth_cap = kDefaultDepthCap);

}  // namespace qsc
