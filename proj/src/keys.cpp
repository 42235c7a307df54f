#include "qsc/keys.hpp"

#include <cassert>

#include "qsc/errors.hpp"

namespace qsc {

namespace {
constexpr uint64_t kKeyStreamTag = 0x6b657973;  // substream label for key symbols
}

Key generate_key(const SourceModel& source, uint64_t master_seed, uint64_t arrival_index) {
    return Key(&source, derive_seed(master_seed, kKeyStreamTag, arrival_index));
}

CompareOutcome compare_counted(Key& k1, Key& k2, uint32_t depth_cap) {
    assert(&k1 != &k2);
    if (depth_cap < 1) throw std::invalid_argument("compare_counted: depth_cap must be >= 1");
    for (uint32_t i = 0; i < depth_cap; ++i) {
        const uint32_t a = k1.symbol(i);
        const uint32_t b = k2.symbol(i);
        if (a != b) {
            return CompareOutcome{a < b ? CompareOutcome::Order::less
                                        : CompareOutcome::Order::greater,
                                  i + 1};
        }
    }
    throw DepthCapExceeded("compare_counted: keys agree through depth cap " +
                           std::to_string(depth_cap));
}

}  // namespace qsc
