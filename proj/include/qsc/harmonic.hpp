#pragma once

#include <cstddef>
#include <deque>
#include <mutex>

#include "qsc/rational.hpp"

namespace qsc {

// Exact first- and second-order harmonic numbers, grown on demand.
// Returned references stay valid for the cache's lifetime (deque storage,
// append-only); growth is serialized by an internal mutex.
class HarmonicCache {
  public:
    const Rational& h1(size_t n);  // H_n = sum_{k<=n} 1/k, H_0 = 0
    const Rational& h2(size_t n);  // H_n^{(2)} = sum_{k<=n} 1/k^2

    size_t watermark() const;
    void reserve(size_t n);  // pre-grow both to n

  private:
    void grow(size_t n);
    std::deque<Rational> h1_{Rational(0)};
    std::deque<Rational> h2_{Rational(0)};
    mutable std::mutex mu_;
};

// process-wide cache shared by the exact/lemmas/covdp modules
HarmonicCache& harmonics();

}  // namespace qsc
