#include "qsc/harmonic.hpp"

namespace qsc {

void HarmonicCache::grow(size_t n) {
    while (h1_.size() <= n) {
        const int64_t k = int64_t(h1_.size());
        Rational h = h1_.back();
        h += Rational(1, k);
        h1_.push_back(std::move(h));
        Rational s = h2_.back();
        s += Rational(1, k * k);
        h2_.push_back(std::move(s));
    }
}

const Rational& HarmonicCache::h1(size_t n) {
    std::lock_guard lock(mu_);
    grow(n);
    return h1_[n];
}

const Rational& HarmonicCache::h2(size_t n) {
    std::lock_guard lock(mu_);
    grow(n);
    return h2_[n];
}

size_t HarmonicCache::watermark() const {
    std::lock_guard lock(mu_);
    return h1_.size() - 1;
}

void HarmonicCache::reserve(size_t n) {
    std::lock_guard lock(mu_);
    grow(n);
}

HarmonicCache& harmonics() {
    static HarmonicCache cache;
    return cache;
}

}  // namespace qsc
